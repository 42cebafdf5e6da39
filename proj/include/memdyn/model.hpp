#ifndef MEMDYN_MODEL_HPP_
#define MEMDYN_MODEL_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "memdyn/constants.hpp"
#include "memdyn/errors.hpp"

namespace memdyn
{

using cplx = std::complex<double>;

/// Index of the pump cavity mode; the probe is index 1.
inline constexpr int kPump = 0;
inline constexpr int kProbe = 1;

/**
 * @brief One membrane mode. Amplitudes are measured in units of x_zpf.
 */
struct MechanicalMode
{
  double omega = 0.0;        ///< rad/s
  double gamma = 0.0;        ///< amplitude decay rate, rad/s
  std::array<double, 2> g{}; ///< single-photon coupling to the pump / probe cavity mode, rad/s
  double mass = 0.0;         ///< effective mass, kg
  double temperature = 0.0;  ///< bath temperature, K

  double x_zpf() const { return std::sqrt(kHbar / (2.0 * mass * omega)); }

  /// Classical occupation k_B T / (hbar omega).
  double n_thermal() const { return kBoltzmann * temperature / (kHbar * omega); }

  /// Thermal position standard deviation sqrt(k_B T / m omega^2).
  double q_thermal() const { return std::sqrt(kBoltzmann * temperature / (mass * omega * omega)); }

  bool operator==(const MechanicalMode &) const = default;
};

struct OpticalMode
{
  double detuning = 0.0;      ///< effective detuning including static shifts, rad/s
  double bare_detuning = 0.0; ///< laser-cavity detuning without static shifts, rad/s
  double kappa_in = 0.0;      ///< rad/s
  double kappa_ex = 0.0;      ///< rad/s
  double power = 0.0;         ///< W
  double wavelength = 0.0;    ///< m
  bool detuning_is_effective = true; ///< which of the two detunings the config fixed

  double kappa() const { return kappa_in + kappa_ex; }
  double laser_omega() const { return kTwoPi * kSpeedOfLight / wavelength; }

  /// Drive rate E = sqrt(2 kappa_in P / hbar omega_L), in 1/s.
  double drive_rate(double input_power) const
  {
    return std::sqrt(2.0 * kappa_in * input_power / (kHbar * laser_omega()));
  }
  double drive_rate() const { return drive_rate(power); }

  /// Input field amplitude sqrt(P / hbar omega_L), in sqrt(photons/s).
  double input_amplitude() const { return std::sqrt(power / (kHbar * laser_omega())); }

  /// W = i Delta - kappa.
  cplx w() const { return {-kappa(), detuning}; }

  bool operator==(const OpticalMode &) const = default;
};

struct ProbeModulation
{
  double depth = 0.0; ///< phase-modulation index, rad
  double omega = 0.0; ///< rad/s

  bool operator==(const ProbeModulation &) const = default;
};

struct DetectionBlock
{
  double lo_power = 1e-3;       ///< W
  double sensitivity = 0.8;     ///< photodiode responsivity, A/W
  double transimpedance = 1e4;  ///< V/A
  double termination = 50.0;    ///< ohm
  bool lo_phase_auto = true;    ///< lock the LO phase for zero DC
  double lo_phase = 0.0;        ///< rad, used when not auto

  bool operator==(const DetectionBlock &) const = default;
};

struct CavityBlock
{
  double fsr = 0.0;         ///< rad/s
  double finesse = 0.0;     ///< zero when not given
  double length = 0.0;      ///< m, zero when not given
  double kappa_loss = 0.0;  ///< rad/s, metadata only

  bool operator==(const CavityBlock &) const = default;
};

/**
 * @brief Full parameter set of the two-membrane, two-cavity-mode system.
 *
 * Immutable once built by make_system_params / load_config.
 */
struct SystemParams
{
  std::array<MechanicalMode, 2> mech{};
  std::array<OpticalMode, 2> opt{};
  ProbeModulation modulation{};
  DetectionBlock detection{};
  CavityBlock cavity{};
  std::array<cplx, 2> static_shift{};  ///< beta_{0,j}
  std::vector<std::string> warnings;

  const OpticalMode & pump() const { return opt[kPump]; }
  const OpticalMode & probe() const { return opt[kProbe]; }

  /// g_ij: coupling of cavity mode i to mechanical mode j.
  double g(int i, int j) const { return mech[static_cast<std::size_t>(j)].g[static_cast<std::size_t>(i)]; }

  /// Cavity finesse, from the explicit value when present, else FSR / 2 kappa_probe.
  double finesse() const { return cavity.finesse > 0.0 ? cavity.finesse : cavity.fsr / (2.0 * probe().kappa()); }

  bool operator==(const SystemParams &) const = default;
};

/// Mean intracavity photon number of mode i at the given detuning and input power.
inline double mean_photons(const OpticalMode & mode, double detuning, double input_power)
{
  const double e = mode.drive_rate(input_power);
  const double k = mode.kappa();
  return e * e / (k * k + detuning * detuning);
}

/// Static shift beta_0,j = i sum_i g_ij n_i / (i omega_j + gamma_j) for given photon numbers.
inline std::array<cplx, 2> static_shift_from_photons(const SystemParams & p, const std::array<double, 2> & photons)
{
  std::array<cplx, 2> out{};
  for (int j = 0; j < 2; ++j) {
    const auto & m = p.mech[static_cast<std::size_t>(j)];
    cplx force{0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
      force += cplx(0.0, p.g(i, j) * photons[static_cast<std::size_t>(i)]);
    }
    out[static_cast<std::size_t>(j)] = force / cplx(m.gamma, m.omega);
  }
  return out;
}

/// Detuning shift 2 sum_j g_ij Re beta_0,j of cavity mode i.
inline double detuning_shift(const SystemParams & p, int i, const std::array<cplx, 2> & shifts)
{
  return 2.0 * (p.g(i, 0) * shifts[0].real() + p.g(i, 1) * shifts[1].real());
}

/**
 * @brief Resolve static shifts and the bare/effective detuning pair.
 *
 * When opt[i].detuning_is_effective is set the effective detuning of mode i is kept and
 * the bare detuning is inferred; otherwise the bare detuning is kept and the
 * effective one found by fixed-point iteration (relative tolerance 1e-9,
 * at most 200 iterations).
 */
inline void resolve_static_shifts(SystemParams & p)
{
  const std::array<bool, 2> effective_given{p.opt[0].detuning_is_effective, p.opt[1].detuning_is_effective};
  std::array<double, 2> eff{p.opt[0].detuning, p.opt[1].detuning};
  for (int i = 0; i < 2; ++i) {
    if (!effective_given[static_cast<std::size_t>(i)]) {
      eff[static_cast<std::size_t>(i)] = p.opt[static_cast<std::size_t>(i)].bare_detuning;
    }
  }

  std::array<cplx, 2> shifts{};
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    std::array<double, 2> photons{};
    for (int i = 0; i < 2; ++i) {
      const auto & o = p.opt[static_cast<std::size_t>(i)];
      photons[static_cast<std::size_t>(i)] = mean_photons(o, eff[static_cast<std::size_t>(i)], o.power);
    }
    shifts = static_shift_from_photons(p, photons);

    double change = 0.0;
    for (int i = 0; i < 2; ++i) {
      if (effective_given[static_cast<std::size_t>(i)]) {
        continue;
      }
      const double next = p.opt[static_cast<std::size_t>(i)].bare_detuning + detuning_shift(p, i, shifts);
      const double scale = std::max(std::abs(next), p.opt[static_cast<std::size_t>(i)].kappa());
      change = std::max(change, std::abs(next - eff[static_cast<std::size_t>(i)]) / scale);
      eff[static_cast<std::size_t>(i)] = next;
    }
    if (change < 1e-9) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("static shift iteration did not converge in 200 iterations");
  }

  p.static_shift = shifts;
  for (int i = 0; i < 2; ++i) {
    auto & o = p.opt[static_cast<std::size_t>(i)];
    o.detuning = eff[static_cast<std::size_t>(i)];
    o.bare_detuning = eff[static_cast<std::size_t>(i)] - detuning_shift(p, i, shifts);
  }
}

/// Copy of @p p with a different pump input power; static shifts are re-resolved.
inline SystemParams with_pump_power(const SystemParams & p, double power)
{
  SystemParams out = p;
  out.opt[kPump].power = power;
  resolve_static_shifts(out);
  return out;
}

/// Derived quantities reported by derived_params().
struct DerivedReport
{
  std::array<double, 2> kappa{};        ///< rad/s
  std::array<double, 2> drive_rate{};   ///< 1/s
  std::array<double, 2> x_zpf{};        ///< m
  std::array<double, 2> n_thermal{};
  std::array<double, 2> q_thermal{};    ///< m
  std::array<double, 2> bare_detuning{};///< rad/s
  double finesse = 0.0;
  double response_length = 0.0;         ///< lambda_0 / 2F, m
  double xi_cav = 0.0;                  ///< modulation index for a displacement of one response length
};

inline DerivedReport derived_params(const SystemParams & p)
{
  DerivedReport r;
  for (std::size_t i = 0; i < 2; ++i) {
    r.kappa[i] = p.opt[i].kappa();
    r.drive_rate[i] = p.opt[i].drive_rate();
    r.bare_detuning[i] = p.opt[i].bare_detuning;
    r.x_zpf[i] = p.mech[i].x_zpf();
    r.n_thermal[i] = p.mech[i].n_thermal();
    r.q_thermal[i] = p.mech[i].q_thermal();
  }
  r.finesse = p.finesse();
  r.response_length = p.probe().wavelength / (2.0 * r.finesse);
  // xi = 2 g |A| / omega with q = 2 |A| x_zpf.
  const auto & m1 = p.mech[0];
  r.xi_cav = (2.0 * m1.g[kProbe] / m1.omega) * r.response_length / (2.0 * m1.x_zpf());
  return r;
}

}  // namespace memdyn

#endif  // MEMDYN_MODEL_HPP_
