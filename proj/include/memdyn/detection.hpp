#ifndef MEMDYN_DETECTION_HPP_
#define MEMDYN_DETECTION_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "memdyn/cavity_response.hpp"
#include "memdyn/model.hpp"
#include "memdyn/roots.hpp"
#include "memdyn/slowflow.hpp"

namespace memdyn
{

struct HomodyneConfig
{
  double lo_power = 1e-3;
  double input_power = 0.0;
  double sensitivity = 0.8;
  double transimpedance = 1e4;
  double termination = 50.0;
  std::optional<double> lo_phase;  ///< empty means auto (zero-DC lock)

  static HomodyneConfig from(const SystemParams & p)
  {
    HomodyneConfig h;
    h.lo_power = p.detection.lo_power;
    h.input_power = p.probe().power;
    h.sensitivity = p.detection.sensitivity;
    h.transimpedance = p.detection.transimpedance;
    h.termination = p.detection.termination;
    if (!p.detection.lo_phase_auto) {
      h.lo_phase = p.detection.lo_phase;
    }
    return h;
  }

  /// Volts per unit of Re[R e^{-i phi_lo}].
  double gain() const { return transimpedance * sensitivity * 2.0 * std::sqrt(lo_power * input_power); }
};

/**
 * @brief LO phase giving zero DC: Re[R_DC e^{-i phi}] = 0, phi in (0, pi].
 *
 * Equivalent to the arctan[Re R_DC / Im R_DC] prescription up to the branch;
 * a real R_DC locks at pi/2.
 */
inline double lo_phase_lock(cplx r_dc)
{
  if (r_dc == cplx{}) {
    throw std::invalid_argument("lo_phase_lock: R_DC = 0, phase undefined");
  }
  const double pi = std::numbers::pi;
  double phi = std::fmod(std::arg(r_dc) + 0.5 * pi, pi);
  if (phi <= 0.0) {
    phi += pi;
  }
  return phi;
}

/// V_H = |R+ - R-*| / 2.
inline double homodyne_asn(cplx plus, cplx minus) { return 0.5 * std::abs(plus - std::conj(minus)); }

inline double homodyne_asn(const TonePair & t) { return homodyne_asn(t.plus, t.minus); }

/// Amplitude of the tone in Re[R e^{-i phi}] for an arbitrary LO phase.
inline double tone_amplitude(const TonePair & t, double phi)
{
  const cplx rot = std::polar(1.0, -phi);
  return std::abs(t.plus * rot + std::conj(t.minus * rot));
}

/// 2 |J_1(beta)| / J_0(beta): the modulation index that makes the tone ratios exactly beta-free.
inline double effective_mod_depth(double beta)
{
  return 2.0 * std::abs(std::cyl_bessel_j(1.0, beta)) / std::cyl_bessel_j(0.0, beta);
}

struct Ratios
{
  double t1 = 0.0;          ///< V(omega_1) beta / V(omega_b)
  double tsb = 0.0;         ///< V(omega_sm) / V(omega_2)
  double t2 = 0.0;          ///< V(omega_2) beta / V(omega_b)
  double tsb_printed = 0.0; ///< V(omega_sb) / V(omega_2), as literally printed
};

inline Ratios ratios_from_set(const ReflectionSet & rs)
{
  const double vb = homodyne_asn(rs[ToneId::OmegaB]);
  if (!(vb > 0.0)) {
    throw std::invalid_argument("ratios: calibration-tone amplitude vanishes (mod_depth = 0?)");
  }
  const double beta = effective_mod_depth(rs.mod_depth);
  const double v2 = homodyne_asn(rs[ToneId::Omega2]);
  Ratios r;
  r.t1 = homodyne_asn(rs[ToneId::Omega1]) * beta / vb;
  r.t2 = v2 * beta / vb;
  r.tsb = v2 > 0.0 ? homodyne_asn(rs[ToneId::OmegaSM]) / v2 : 0.0;
  r.tsb_printed = v2 > 0.0 ? homodyne_asn(rs[ToneId::OmegaSB]) / v2 : 0.0;
  return r;
}

/// g_2 |A_2| for the second mode at its thermal displacement, q = 2 |A| x_zpf.
inline double thermal_g2A2(const SystemParams & p)
{
  const auto & m2 = p.mech[1];
  return m2.g[kProbe] * m2.q_thermal() / (2.0 * m2.x_zpf());
}

inline Ratios ratios(double xi, const SystemParams & p, int M = 0, std::optional<double> g2A2 = std::nullopt)
{
  if (xi < 0.0) {
    throw std::invalid_argument("ratios: xi must be non-negative");
  }
  return ratios_from_set(reflection_set(xi, g2A2.value_or(thermal_g2A2(p)), p, M));
}

/// Reference point standing in for xi -> 0.
inline constexpr double kLinearXi = 1e-4;

struct CorrectionFactors
{
  double n1 = 1.0;
  double n2 = 1.0;
};

/**
 * @brief N_1 = [T_1/xi] / lim [T_1/xi], N_2 = T_2 / lim T_2, limits taken at xi = 1e-4.
 */
inline CorrectionFactors correction_factors(double xi, const SystemParams & p, int M = 0)
{
  const Ratios ref = ratios(kLinearXi, p, M);
  const Ratios r = ratios(std::max(xi, kLinearXi * 1e-6), p, M);
  CorrectionFactors c;
  c.n1 = xi > 0.0 ? (r.t1 / xi) / (ref.t1 / kLinearXi) : 1.0;
  c.n2 = r.t2 / ref.t2;
  return c;
}

enum class RatioKind
{
  T1,
  Tsb,
};

inline double ratio_value(RatioKind kind, double xi, const SystemParams & p, int M)
{
  const Ratios r = ratios(xi, p, M);
  return kind == RatioKind::T1 ? r.t1 : r.tsb;
}

struct XiBranch
{
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * @brief Monotone branch of T(xi) on [0, xi_scan]: the first one, or the one containing @p hint.
 */
inline XiBranch monotone_branch(RatioKind kind, const SystemParams & p, std::optional<double> hint = std::nullopt,
                                double xi_scan = 5.0, double step = 0.01, int M = 0)
{
  const auto n = static_cast<std::size_t>(std::ceil(xi_scan / step));
  std::vector<double> xs(n + 1);
  std::vector<double> ts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    xs[k] = static_cast<double>(k) * step;
    ts[k] = ratio_value(kind, xs[k], p, M);
  }
  std::vector<double> edges{0.0};
  for (std::size_t k = 1; k < n; ++k) {
    const bool max = ts[k] > ts[k - 1] && ts[k] >= ts[k + 1];
    const bool min = ts[k] < ts[k - 1] && ts[k] <= ts[k + 1];
    if (max || min) {
      // Refine the extremum on a finer grid around the node.
      double best = xs[k];
      double best_t = ts[k];
      for (int q = -50; q <= 50; ++q) {
        const double x = xs[k] + q * step / 50.0;
        const double v = ratio_value(kind, x, p, M);
        if ((max && v > best_t) || (min && v < best_t)) {
          best = x;
          best_t = v;
        }
      }
      edges.push_back(best);
    }
  }
  edges.push_back(xi_scan);
  if (!hint) {
    return {edges[0], edges[1]};
  }
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (*hint >= edges[k] && *hint <= edges[k + 1]) {
      return {edges[k], edges[k + 1]};
    }
  }
  throw std::invalid_argument("infer_xi: branch hint outside scanned range");
}

/**
 * @brief Invert a measured T_1 or T_sb on a monotone branch by bisection (to 1e-10 in xi).
 */
inline double infer_xi(double measured, RatioKind kind, const SystemParams & p, int M = 0,
                       std::optional<double> hint = std::nullopt)
{
  const XiBranch br = monotone_branch(kind, p, hint, 5.0, 0.01, M);
  auto f = [&](double xi) { return ratio_value(kind, xi, p, M) - measured; };
  const double flo = f(br.lo);
  const double fhi = f(br.hi);
  if ((flo > 0.0) == (fhi > 0.0)) {
    const double a = flo + measured;
    const double b = fhi + measured;
    throw std::out_of_range(
      "infer_xi: ratio " + std::to_string(measured) + " outside achievable interval [" +
      std::to_string(std::min(a, b)) + ", " + std::to_string(std::max(a, b)) + "] of the branch");
  }
  return bisect(f, br.lo, br.hi, 1e-12, 1e-12);
}

/// V_H(t) = g_T S 2 sqrt(P_lo P_in) Re[R(t) e^{-i phi_lo}]; auto phase locks on the series mean.
inline std::vector<double> voltage_signal(const std::vector<cplx> & r, const HomodyneConfig & hc, double * phase_used = nullptr)
{
  double phi = 0.0;
  if (hc.lo_phase) {
    phi = *hc.lo_phase;
  } else {
    cplx mean{};
    for (const auto & z : r) {
      mean += z;
    }
    phi = lo_phase_lock(mean / static_cast<double>(std::max<std::size_t>(r.size(), 1)));
  }
  if (phase_used) {
    *phase_used = phi;
  }
  const cplx rot = std::polar(1.0, -phi);
  const double g = hc.gain();
  std::vector<double> v(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    v[k] = g * (r[k] * rot).real();
  }
  return v;
}

struct ShotNoiseSensitivity
{
  double delta_x = 0.0; ///< m / sqrt(Hz)
  double eta = 0.0;
  double coupling_efficiency = 0.0; ///< 2 kappa_in / kappa
  double transduction = 0.0;        ///< g lambda / (2 FSR x_zpf)
};

/**
 * @brief Shot-noise-limited displacement sensitivity at omega_1 for the probe.
 *
 * delta_x = (2 P_in / hbar omega_L)^{-1/2} (lambda / F) eta^{-1} sqrt(1 + omega_1^2 / kappa^2).
 */
inline ShotNoiseSensitivity shot_noise_sensitivity(const SystemParams & p, const HomodyneConfig & hc)
{
  const auto & probe = p.probe();
  const auto & m1 = p.mech[0];
  ShotNoiseSensitivity s;
  s.coupling_efficiency = 2.0 * probe.kappa_in / probe.kappa();
  s.transduction = m1.g[kProbe] * probe.wavelength / (2.0 * p.cavity.fsr * m1.x_zpf());
  s.eta = s.coupling_efficiency * s.transduction;
  const double flux = 2.0 * hc.input_power / (kHbar * probe.laser_omega());
  const double w = m1.omega / probe.kappa();
  s.delta_x = (1.0 / std::sqrt(flux)) * (probe.wavelength / p.finesse()) / s.eta * std::sqrt(1.0 + w * w);
  return s;
}

/// Slope K in C(Delta) = -K Delta for mode j read by the probe.
inline double variance_ratio_slope(int j, const SystemParams & p)
{
  const auto & m = p.mech[static_cast<std::size_t>(j)];
  const auto & probe = p.probe();
  const double g = m.g[kProbe];
  const double e = probe.drive_rate();
  const double k = probe.kappa();
  const double denom = k * k + m.omega * m.omega;
  return (2.0 * g * g * e * e / (m.gamma * k)) * (4.0 * m.omega / (denom * denom));
}

/// Forward model: Delta q / Delta q_th = 1 / sqrt(1 + C(Delta)).
inline double variance_ratio_from_detuning(double delta, int j, const SystemParams & p)
{
  const double c = -variance_ratio_slope(j, p) * delta;
  if (c <= -1.0) {
    throw std::domain_error("variance ratio: C(Delta) <= -1, outside validity");
  }
  return 1.0 / std::sqrt(1.0 + c);
}

/// Probe detuning from the measured standard-deviation ratio of mode j.
inline double detuning_from_variance_ratio(double ratio, int j, const SystemParams & p)
{
  if (!(ratio > 0.0)) {
    throw std::domain_error("detuning_from_variance_ratio: ratio must be positive");
  }
  const double c = 1.0 / (ratio * ratio) - 1.0;
  return -c / variance_ratio_slope(j, p);
}

// ---------------------------------------------------------------------------
// Calibration

/// Tone amplitudes read from a spectrum, all in the same unit (V rms or V amplitude).
struct ObservedTones
{
  std::optional<double> v1;
  std::optional<double> v2;
  std::optional<double> vb;
  std::optional<double> vsm;
  std::optional<double> vsb;
  std::optional<double> pre_pump_q2;  ///< Delta q_2 measured before pump-on, m
};

struct CalibrationReport
{
  bool xi_valid = false;
  double xi = 0.0;
  std::string xi_source;
  double t1 = 0.0;
  double t2 = 0.0;
  double tsb = 0.0;
  double n1 = 1.0;
  double n2 = 1.0;
  double q1_effective = 0.0;  ///< m
  double q1_observed = 0.0;   ///< m
  double q2_effective = 0.0;  ///< m
  double q2_observed = 0.0;   ///< m
  double enhancement = 0.0;   ///< sqrt(gamma_2 / gamma_2^eff) at the inferred xi
  double q2_predicted = 0.0;  ///< pre_pump_q2 * enhancement * N_2, m
  std::vector<std::string> flags;
};

/**
 * @brief Infer xi from T_1 (or T_sb), apply N_1/N_2, and convert both modes to metres
 * through the calibration tone.
 */
inline CalibrationReport calibrate(const ObservedTones & obs, const SystemParams & p, int M = 0,
                                   std::optional<double> branch_hint = std::nullopt)
{
  CalibrationReport r;
  const double beta = effective_mod_depth(p.modulation.depth);
  const auto & m1 = p.mech[0];
  const auto & m2 = p.mech[1];
  const Ratios lin = ratios(kLinearXi, p, M, 1.0);  // T2 per unit g2A2 in the linear limit

  if (!obs.vb || !(*obs.vb > 0.0)) {
    r.flags.push_back("missing calibration tone at omega_b");
  }
  if (!obs.v1) {
    r.flags.push_back("missing tone at omega_1");
  }
  if (!obs.v2) {
    r.flags.push_back("missing tone at omega_2");
  }

  if (obs.v1 && obs.vb && *obs.vb > 0.0) {
    r.t1 = *obs.v1 * beta / *obs.vb;
    r.xi = infer_xi(r.t1, RatioKind::T1, p, M, branch_hint);
    r.xi_valid = true;
    r.xi_source = "T1";
  } else if (obs.vsm && obs.v2 && *obs.v2 > 0.0) {
    r.tsb = *obs.vsm / *obs.v2;
    r.xi = infer_xi(r.tsb, RatioKind::Tsb, p, M, branch_hint);
    r.xi_valid = true;
    r.xi_source = "Tsb";
  }
  if (!r.xi_valid) {
    r.flags.push_back("xi not inferable");
    return r;
  }
  if (obs.vsm && obs.v2 && *obs.v2 > 0.0) {
    r.tsb = *obs.vsm / *obs.v2;
  }

  const auto c = correction_factors(r.xi, p, M);
  r.n1 = c.n1;
  r.n2 = c.n2;

  const double g1 = m1.g[kProbe];
  r.q1_effective = r.xi * m1.omega * m1.x_zpf() / g1;
  if (obs.v1 && obs.vb && *obs.vb > 0.0) {
    // Linear reading of the omega_1 tone: xi_lin = T1 / (dT1/dxi at 0).
    const double xi_lin = r.t1 / (lin.t1 / kLinearXi);
    r.q1_observed = xi_lin * m1.omega * m1.x_zpf() / g1;
  }

  if (obs.v2 && obs.vb && *obs.vb > 0.0) {
    r.t2 = *obs.v2 * beta / *obs.vb;
    const double g2A2_lin = r.t2 / lin.t2;
    const double a2_lin = g2A2_lin / m2.g[kProbe];
    r.q2_observed = 2.0 * a2_lin * m2.x_zpf();
    r.q2_effective = r.q2_observed / r.n2;
  }

  // Second-mode enhancement with mode 1 held at the inferred amplitude.
  LimitCycleSolution lc;
  lc.found = true;
  lc.mode = 0;
  lc.xi = r.xi;
  lc.amplitude = amplitude_from_xi(p, 0, r.xi);
  const auto s2 = second_mode_steady(p, lc, M);
  if (s2.stable) {
    r.enhancement = s2.enhancement;
    if (obs.pre_pump_q2) {
      r.q2_predicted = *obs.pre_pump_q2 * r.enhancement * r.n2;
    }
  } else {
    r.flags.push_back("second mode unstable at inferred xi");
  }
  return r;
}

}  // namespace memdyn

#endif  // MEMDYN_DETECTION_HPP_
