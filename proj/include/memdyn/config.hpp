#ifndef MEMDYN_CONFIG_HPP_
#define MEMDYN_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "memdyn/model.hpp"

namespace memdyn
{

/// Membrane density used when masses come from geometry, kg/m^3.
inline constexpr double kMembraneDensity = 3100.0;

namespace detail
{

inline std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Frequency keys end in _hz, powers in _w, lengths in _m.
inline bool has_suffix(const std::string & key, const std::string & suffix)
{
  return key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline const std::set<std::string> & known_keys()
{
  static const std::set<std::string> keys = {
    "omega1_hz", "omega2_hz", "gamma1_hz", "gamma2_hz",
    "g1_hz", "g2_hz", "g11_hz", "g21_hz", "g12_hz", "g22_hz",
    "mass1_kg", "mass2_kg", "qth1_m", "qth2_m",
    "membrane1_lx_m", "membrane1_ly_m", "membrane2_lx_m", "membrane2_ly_m", "membrane_thickness_m",
    "temperature_k",
    "delta1_hz", "delta2_hz", "delta1_bare_hz", "delta2_bare_hz",
    "kappa_in_hz", "kappa_ex_hz", "kappa_loss_hz",
    "fsr_hz", "finesse", "cavity_length_m",
    "pump_power_w", "probe_power_w", "wavelength_m",
    "mod_depth_rad", "omega_b_hz",
    "lo_power_w", "pd_sensitivity_a_per_w", "transimpedance_v_per_a", "termination_ohm", "lo_phase",
  };
  return keys;
}

class Document
{
public:
  explicit Document(const std::string & text)
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) {
        line.erase(hash);
      }
      line = trim(line);
      if (line.empty()) {
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(line, "line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (!known_keys().count(key)) {
        throw ConfigError(key, "unknown key");
      }
      if (values_.count(key)) {
        throw ConfigError(key, "duplicate key");
      }
      if (value.empty()) {
        throw ConfigError(key, "empty value");
      }
      values_[key] = value;
    }
  }

  bool has(const std::string & key) const { return values_.count(key) != 0; }

  const std::string & raw(const std::string & key) const
  {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      throw ConfigError(key, "missing key");
    }
    return it->second;
  }

  double number(const std::string & key) const
  {
    const std::string & v = raw(key);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception &) {
      throw ConfigError(key, "not a number: '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(x)) {
      throw ConfigError(key, "unit violation or trailing text in '" + v + "'");
    }
    return x;
  }

  double number_or(const std::string & key, double fallback) const { return has(key) ? number(key) : fallback; }

  /// Value converted to SI: frequencies become rad/s.
  double si(const std::string & key) const
  {
    const double x = number(key);
    return has_suffix(key, "_hz") ? hz_to_rad(x) : x;
  }

  double positive_rate(const std::string & key) const
  {
    const double x = si(key);
    if (!(x > 0.0)) {
      throw ConfigError(key, "non-positive rate: " + key.substr(0, key.find_first_of("0123456789_")));
    }
    return x;
  }

  double positive(const std::string & key) const
  {
    const double x = si(key);
    if (!(x > 0.0)) {
      throw ConfigError(key, "value must be positive");
    }
    return x;
  }

  double non_negative(const std::string & key) const
  {
    const double x = si(key);
    if (x < 0.0) {
      throw ConfigError(key, "value must be non-negative");
    }
    return x;
  }

private:
  std::map<std::string, std::string> values_;
};

inline double coupling(const Document & d, int cavity, int mode)
{
  const std::string explicit_key = "g" + std::to_string(cavity + 1) + std::to_string(mode + 1) + "_hz";
  const std::string shared_key = "g" + std::to_string(mode + 1) + "_hz";
  const std::string key = d.has(explicit_key) ? explicit_key : shared_key;
  const double g = d.si(key);
  if (g < 0.0) {
    throw ConfigError(key, "coupling must be non-negative");
  }
  return g;
}

inline double mode_mass(const Document & d, int mode, double omega, double temperature)
{
  const std::string idx = std::to_string(mode + 1);
  if (d.has("mass" + idx + "_kg")) {
    return d.positive("mass" + idx + "_kg");
  }
  if (d.has("qth" + idx + "_m")) {
    // q_th^2 = k_B T / (m omega^2)
    const double q = d.positive("qth" + idx + "_m");
    return kBoltzmann * temperature / (omega * omega * q * q);
  }
  const double lx = d.positive("membrane" + idx + "_lx_m");
  const double ly = d.positive("membrane" + idx + "_ly_m");
  const double lm = d.positive("membrane_thickness_m");
  return kMembraneDensity * lx * ly * lm / 4.0;
}

inline double detuning(const Document & d, int mode, bool & effective)
{
  const std::string idx = std::to_string(mode + 1);
  const bool eff = d.has("delta" + idx + "_hz");
  const bool bare = d.has("delta" + idx + "_bare_hz");
  if (eff == bare) {
    throw ConfigError("delta" + idx + "_hz", "exactly one of delta" + idx + "_hz and delta" + idx + "_bare_hz required");
  }
  effective = eff;
  return d.si(eff ? "delta" + idx + "_hz" : "delta" + idx + "_bare_hz");
}

/// Shortest decimal Hz string whose conversion back to rad/s reproduces @p rad exactly.
inline std::string hz_string(double rad)
{
  char buf[64];
  double hz = rad_to_hz(rad);
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (int digits = 15; digits <= 17; ++digits) {
      std::snprintf(buf, sizeof buf, "%.*g", digits, hz);
      if (hz_to_rad(std::stod(buf)) == rad) {
        return buf;
      }
    }
    hz = hz_to_rad(hz) < rad ? std::nextafter(hz, INFINITY) : std::nextafter(hz, -INFINITY);
  }
  std::snprintf(buf, sizeof buf, "%.17g", rad_to_hz(rad));
  return buf;
}

inline std::string si_string(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/**
 * @brief Parse a flat `key = value` document into validated SystemParams.
 *
 * Frequencies carry a `_hz` suffix and are stored as rad/s; other values are SI.
 * Masses come from `massN_kg`, else from `qthN_m` (thermal displacement), else
 * from membrane geometry.
 */
inline SystemParams load_config(const std::string & text)
{
  const detail::Document d(text);
  SystemParams p;

  const double temperature = d.has("temperature_k") ? d.non_negative("temperature_k") : 300.0;
  for (int j = 0; j < 2; ++j) {
    const std::string idx = std::to_string(j + 1);
    auto & m = p.mech[static_cast<std::size_t>(j)];
    m.omega = d.positive_rate("omega" + idx + "_hz");
    m.gamma = d.positive_rate("gamma" + idx + "_hz");
    m.g = {detail::coupling(d, 0, j), detail::coupling(d, 1, j)};
    m.temperature = temperature;
    m.mass = detail::mode_mass(d, j, m.omega, temperature);
  }

  const double kappa_in = d.positive_rate("kappa_in_hz");
  const double kappa_ex = d.non_negative("kappa_ex_hz");
  const double wavelength = d.positive("wavelength_m");
  const std::array<std::string, 2> power_keys{"pump_power_w", "probe_power_w"};
  for (int i = 0; i < 2; ++i) {
    auto & o = p.opt[static_cast<std::size_t>(i)];
    bool effective = true;
    const double delta = detail::detuning(d, i, effective);
    o.detuning_is_effective = effective;
    o.detuning = delta;
    o.bare_detuning = delta;
    o.kappa_in = kappa_in;
    o.kappa_ex = kappa_ex;
    o.power = d.non_negative(power_keys[static_cast<std::size_t>(i)]);
    o.wavelength = wavelength;
  }

  p.modulation.depth = d.has("mod_depth_rad") ? d.non_negative("mod_depth_rad") : 0.0;
  p.modulation.omega = d.has("omega_b_hz") ? d.positive_rate("omega_b_hz") : 0.0;
  if (p.modulation.depth > 0.0 && p.modulation.omega == 0.0) {
    throw ConfigError("omega_b_hz", "missing key");
  }

  p.cavity.fsr = d.positive_rate("fsr_hz");
  p.cavity.finesse = d.has("finesse") ? d.positive("finesse") : 0.0;
  p.cavity.length = d.has("cavity_length_m") ? d.positive("cavity_length_m") : 0.0;
  p.cavity.kappa_loss = d.has("kappa_loss_hz") ? d.non_negative("kappa_loss_hz") : 0.0;

  auto & det = p.detection;
  det.lo_power = d.has("lo_power_w") ? d.positive("lo_power_w") : det.lo_power;
  det.sensitivity = d.has("pd_sensitivity_a_per_w") ? d.positive("pd_sensitivity_a_per_w") : det.sensitivity;
  det.transimpedance = d.has("transimpedance_v_per_a") ? d.positive("transimpedance_v_per_a") : det.transimpedance;
  det.termination = d.has("termination_ohm") ? d.positive("termination_ohm") : det.termination;
  if (d.has("lo_phase") && d.raw("lo_phase") != "auto") {
    det.lo_phase_auto = false;
    det.lo_phase = d.number("lo_phase");
  }

  const double kappa = kappa_in + kappa_ex;
  if (p.cavity.finesse > 0.0) {
    const double implied = p.cavity.fsr / p.cavity.finesse;
    if (std::abs(2.0 * kappa - implied) > 0.05 * implied) {
      throw ConfigError("finesse", "2 kappa differs from FSR/finesse by more than 5%");
    }
  }

  for (int j = 0; j < 2; ++j) {
    const auto & m = p.mech[static_cast<std::size_t>(j)];
    if (m.temperature > 0.0 && m.n_thermal() < 100.0) {
      p.warnings.push_back("mode " + std::to_string(j + 1) + ": thermal occupation below 100, classical model questionable");
    }
  }
  if (p.modulation.depth > 0.3) {
    p.warnings.push_back("mod_depth above 0.3, small-modulation analysis not valid");
  }

  resolve_static_shifts(p);
  return p;
}

inline SystemParams load_config_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

/// Emit a document that load_config parses back to an equal SystemParams.
inline std::string serialize(const SystemParams & p)
{
  using detail::hz_string;
  using detail::si_string;
  std::ostringstream out;
  for (int j = 0; j < 2; ++j) {
    const auto & m = p.mech[static_cast<std::size_t>(j)];
    const std::string idx = std::to_string(j + 1);
    out << "omega" << idx << "_hz = " << hz_string(m.omega) << "\n";
    out << "gamma" << idx << "_hz = " << hz_string(m.gamma) << "\n";
    out << "g1" << idx << "_hz = " << hz_string(m.g[0]) << "\n";
    out << "g2" << idx << "_hz = " << hz_string(m.g[1]) << "\n";
    out << "mass" << idx << "_kg = " << si_string(m.mass) << "\n";
  }
  out << "temperature_k = " << si_string(p.mech[0].temperature) << "\n";
  for (int i = 0; i < 2; ++i) {
    const auto & o = p.opt[static_cast<std::size_t>(i)];
    const std::string idx = std::to_string(i + 1);
    if (o.detuning_is_effective) {
      out << "delta" << idx << "_hz = " << hz_string(o.detuning) << "\n";
    } else {
      out << "delta" << idx << "_bare_hz = " << hz_string(o.bare_detuning) << "\n";
    }
  }
  out << "kappa_in_hz = " << hz_string(p.opt[0].kappa_in) << "\n";
  out << "kappa_ex_hz = " << hz_string(p.opt[0].kappa_ex) << "\n";
  if (p.cavity.kappa_loss > 0.0) {
    out << "kappa_loss_hz = " << hz_string(p.cavity.kappa_loss) << "\n";
  }
  out << "fsr_hz = " << hz_string(p.cavity.fsr) << "\n";
  if (p.cavity.finesse > 0.0) {
    out << "finesse = " << si_string(p.cavity.finesse) << "\n";
  }
  if (p.cavity.length > 0.0) {
    out << "cavity_length_m = " << si_string(p.cavity.length) << "\n";
  }
  out << "pump_power_w = " << si_string(p.opt[0].power) << "\n";
  out << "probe_power_w = " << si_string(p.opt[1].power) << "\n";
  out << "wavelength_m = " << si_string(p.opt[0].wavelength) << "\n";
  out << "mod_depth_rad = " << si_string(p.modulation.depth) << "\n";
  if (p.modulation.omega > 0.0) {
    out << "omega_b_hz = " << hz_string(p.modulation.omega) << "\n";
  }
  out << "lo_power_w = " << si_string(p.detection.lo_power) << "\n";
  out << "pd_sensitivity_a_per_w = " << si_string(p.detection.sensitivity) << "\n";
  out << "transimpedance_v_per_a = " << si_string(p.detection.transimpedance) << "\n";
  out << "termination_ohm = " << si_string(p.detection.termination) << "\n";
  out << "lo_phase = " << (p.detection.lo_phase_auto ? std::string("auto") : si_string(p.detection.lo_phase)) << "\n";
  return out.str();
}

/// FNV-1a hash of the serialized parameters; tags output files.
inline std::uint64_t params_hash(const SystemParams & p)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : serialize(p)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace memdyn

#endif  // MEMDYN_CONFIG_HPP_
