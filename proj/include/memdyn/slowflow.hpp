#ifndef MEMDYN_SLOWFLOW_HPP_
#define MEMDYN_SLOWFLOW_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "memdyn/bessel.hpp"
#include "memdyn/langevin.hpp"
#include "memdyn/model.hpp"
#include "memdyn/noise.hpp"
#include "memdyn/roots.hpp"

namespace memdyn
{

// ---------------------------------------------------------------------------
// Bessel sums

namespace detail
{

inline int checked_truncation(double xi, int M)
{
  if (M <= 0) {
    return default_truncation(xi);
  }
  if (M < required_truncation(xi)) {
    throw TruncationError(M, required_truncation(xi));
  }
  return M;
}

/// Sum_n J_n(-xi) J_{n+1}(-xi) / ([i n w - W][-i (n+1) w - W*]).
inline cplx sigma_w(double xi, cplx W, double omega, int M)
{
  M = checked_truncation(xi, M);
  const BesselTable j(-xi, M + 1);
  const cplx wc = std::conj(W);
  cplx sum{0.0, 0.0};
  for (int n = -M; n <= M; ++n) {
    const double num = j(n) * j(n + 1);
    if (num == 0.0) {
      continue;
    }
    const cplx den = (cplx(0.0, n * omega) - W) * (cplx(0.0, -(n + 1) * omega) - wc);
    sum += num / den;
  }
  return sum;
}

/// lim_{xi -> 0} sigma / xi.
inline cplx sigma_over_xi_limit(cplx W, double omega)
{
  const cplx wc = std::conj(W);
  return 0.5 / ((cplx(0.0, -omega) - W) * (-wc)) - 0.5 / ((-W) * (cplx(0.0, -omega) - wc));
}

inline cplx sigma_over_xi_w(double xi, cplx W, double omega, int M)
{
  if (std::abs(xi) < 1e-8) {
    return sigma_over_xi_limit(W, omega);
  }
  return sigma_w(xi, W, omega, M) / xi;
}

}  // namespace detail

/**
 * @brief Sigma(xi, kappa, Delta) with W = i Delta - kappa and harmonic spacing omega.
 *
 * @param M truncation |n| <= M; 0 selects ceil(3 xi) + 20. Values below
 *          ceil(3 xi) + 10 throw TruncationError.
 */
inline cplx sigma(double xi, double kappa, double delta, double omega, int M = 0)
{
  return detail::sigma_w(xi, cplx(-kappa, delta), omega, M);
}

/// Sigma / xi, regular at xi = 0.
inline cplx sigma_over_xi(double xi, double kappa, double delta, double omega, int M = 0)
{
  return detail::sigma_over_xi_w(xi, cplx(-kappa, delta), omega, M);
}

struct BrightAmplitude
{
  double magnitude = 0.0;
  double phase = 0.0;
};

/// A^b = (g_1 A_1 + g_2 A_2) / sqrt(g_1^2 + g_2^2).
inline BrightAmplitude bright_amplitude(cplx A1, cplx A2, double g1, double g2)
{
  const double gb = std::hypot(g1, g2);
  if (!(gb > 0.0)) {
    throw std::invalid_argument("bright_amplitude: both couplings are zero");
  }
  const cplx ab = (g1 * A1 + g2 * A2) / gb;
  return {std::abs(ab), std::arg(ab)};
}

/**
 * @brief Auxiliary function F = (E^2 / |A^b|) Sigma(xi), xi = 2 g^b |A^b| / omega_ref.
 *
 * Evaluated as E^2 (2 g^b / omega_ref) Sigma/xi, so |A^b| = 0 is the regular limit.
 */
inline cplx auxiliary_F(double E, double Ab, double omega_ref, cplx W, double gb, int M = 0)
{
  if (!(omega_ref > 0.0)) {
    throw std::invalid_argument("auxiliary_F: omega_ref must be positive");
  }
  const double xi = 2.0 * gb * Ab / omega_ref;
  return E * E * (2.0 * gb / omega_ref) * detail::sigma_over_xi_w(xi, W, omega_ref, M);
}

struct NonlinearCoeffs
{
  cplx d1{};
  cplx d2{};
  cplx d12{};
};

/**
 * @brief d_1, d_2, d_12 at amplitudes (A_1, A_2), with drive rates squared given per cavity mode.
 */
inline NonlinearCoeffs nonlinear_coeffs(
  cplx A1, cplx A2, const SystemParams & p, const std::array<double, 2> & drive_sq, double omega_ref, int M = 0)
{
  NonlinearCoeffs c;
  for (int i = 0; i < 2; ++i) {
    const double gi1 = p.g(i, 0);
    const double gi2 = p.g(i, 1);
    const double gb = std::hypot(gi1, gi2);
    const double e2 = drive_sq[static_cast<std::size_t>(i)];
    if (gb == 0.0 || e2 == 0.0) {
      continue;
    }
    const double ab = std::abs((gi1 * A1 + gi2 * A2) / gb);
    const double xi = 2.0 * gb * ab / omega_ref;
    // F_i / g_i^b
    const cplx f_over_gb =
      e2 * (2.0 / omega_ref) * detail::sigma_over_xi_w(xi, p.opt[static_cast<std::size_t>(i)].w(), omega_ref, M);
    c.d1 += gi1 * gi1 * f_over_gb;
    c.d2 += gi2 * gi2 * f_over_gb;
    c.d12 += gi1 * gi2 * f_over_gb;
  }
  return c;
}

inline std::array<double, 2> drive_squared(const SystemParams & p)
{
  const double e1 = p.opt[kPump].drive_rate();
  const double e2 = p.opt[kProbe].drive_rate();
  return {e1 * e1, e2 * e2};
}

/// Coefficients at the configured powers with omega_ref = omega_1.
inline NonlinearCoeffs nonlinear_coeffs(cplx A1, cplx A2, const SystemParams & p, int M = 0)
{
  return nonlinear_coeffs(A1, A2, p, drive_squared(p), p.mech[0].omega, M);
}

// ---------------------------------------------------------------------------
// Limit cycle of one mode, the other at rest

/// Coupling used to define the modulation index of mode j, xi = 2 g |A| / omega_j: the probe-cavity coupling.
inline double xi_coupling(const SystemParams & p, int j) { return p.g(kProbe, j); }

/// |A_j| corresponding to modulation index xi.
inline double amplitude_from_xi(const SystemParams & p, int j, double xi)
{
  return xi * p.mech[static_cast<std::size_t>(j)].omega / (2.0 * xi_coupling(p, j));
}

/**
 * @brief gamma_j + Im d_j with mode j alone oscillating at modulation index xi, omega_ref = omega_j.
 */
inline double gamma_eff(const SystemParams & p, int j, double xi, int M = 0)
{
  const auto & m = p.mech[static_cast<std::size_t>(j)];
  const double a = amplitude_from_xi(p, j, xi);
  const cplx A1 = j == 0 ? cplx(a, 0.0) : cplx(0.0, 0.0);
  const cplx A2 = j == 1 ? cplx(a, 0.0) : cplx(0.0, 0.0);
  const auto c = nonlinear_coeffs(A1, A2, p, drive_squared(p), m.omega, M);
  return m.gamma + (j == 0 ? c.d1 : c.d2).imag();
}

inline double gamma1_eff(double xi, const SystemParams & p, int M = 0) { return gamma_eff(p, 0, xi, M); }

struct LimitCycleRoot
{
  double xi = 0.0;
  bool stable = false;
};

struct LimitCycleSolution
{
  std::vector<LimitCycleRoot> roots;
  bool found = false;           ///< a stable positive root exists
  double xi = 0.0;              ///< chosen root
  double amplitude = 0.0;       ///< I_st = |A_st|
  double displacement = 0.0;    ///< q_st = 2 I_st x_zpf, m
  double frequency_shift = 0.0; ///< -Re d at the chosen root, rad/s
  int mode = 0;
};

struct LimitCycleOptions
{
  double xi_max = 5.0;
  double xi_step = 0.005;
  double rel_tol = 1e-8;
  int truncation = 0;
  int mode = 0;
};

/**
 * @brief All sign changes of gamma_eff on (0, xi_max], refined by bisection.
 *
 * Stability is the sign of the slope (finite difference, step 1e-4 in xi);
 * the chosen root is the smallest stable one.
 */
inline LimitCycleSolution limit_cycle_solve(const SystemParams & p, const LimitCycleOptions & o = {})
{
  if (!(o.xi_max > 0.0) || !(o.xi_step > 0.0)) {
    throw std::invalid_argument("limit_cycle_solve: xi_max and xi_step must be positive");
  }
  const int j = o.mode;
  auto f = [&](double xi) { return gamma_eff(p, j, xi, o.truncation); };

  const auto n = static_cast<std::size_t>(std::ceil(o.xi_max / o.xi_step));
  std::vector<double> grid(n + 1);
  std::vector<double> values(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    grid[k] = std::min(o.xi_max, static_cast<double>(k) * o.xi_step);
    values[k] = f(grid[k]);
  }

  LimitCycleSolution sol;
  sol.mode = j;
  for (const auto & [lo, hi] : sign_change_intervals(values)) {
    const double xi = bisect(f, grid[lo], grid[hi], o.rel_tol);
    if (!(xi > 0.0)) {
      continue;
    }
    const double h = 1e-4;
    const double slope = (f(xi + h) - f(std::max(0.0, xi - h))) / (xi + h - std::max(0.0, xi - h));
    sol.roots.push_back({xi, slope > 0.0});
  }

  for (const auto & r : sol.roots) {
    if (r.stable) {
      const auto & m = p.mech[static_cast<std::size_t>(j)];
      sol.found = true;
      sol.xi = r.xi;
      sol.amplitude = amplitude_from_xi(p, j, r.xi);
      sol.displacement = 2.0 * sol.amplitude * m.x_zpf();
      const cplx A1 = j == 0 ? cplx(sol.amplitude, 0.0) : cplx(0.0, 0.0);
      const cplx A2 = j == 1 ? cplx(sol.amplitude, 0.0) : cplx(0.0, 0.0);
      const auto c = nonlinear_coeffs(A1, A2, p, drive_squared(p), m.omega, o.truncation);
      sol.frequency_shift = -(j == 0 ? c.d1 : c.d2).real();
      break;
    }
  }
  return sol;
}

/**
 * @brief Smallest pump power at which mode j has a positive limit-cycle root.
 *
 * Bisection on root existence between 0 and an upper bracket found by doubling
 * from 1 uW, to relative 1e-6.
 */
inline double threshold_power(const SystemParams & p, int mode, const LimitCycleOptions & base = {})
{
  LimitCycleOptions o = base;
  o.mode = mode;
  auto has_root = [&](double power) { return !limit_cycle_solve(with_pump_power(p, power), o).roots.empty(); };

  double hi = 1e-6;
  while (!has_root(hi)) {
    hi *= 2.0;
    if (hi > 1.0) {
      throw NumericalError("threshold_power: no limit cycle below 1 W");
    }
  }
  double lo = hi / 2.0;
  if (has_root(lo)) {
    lo = 0.0;
    if (has_root(lo)) {
      return 0.0;
    }
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (has_root(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct MultistabilityResult
{
  bool found = false;
  double power = 0.0;           ///< smallest power with >= 2 positive roots, W
  std::size_t roots_at_power = 0;
};

/**
 * @brief Scan pump power upward in steps of @p resolution for the first power with two or more roots.
 *
 * The crossing is then narrowed by bisection to resolution / 64.
 */
inline MultistabilityResult multistability_boundary(
  const SystemParams & p, double power_lo, double power_hi, double resolution, LimitCycleOptions o = {})
{
  if (!(resolution > 0.0) || !(power_hi > power_lo)) {
    throw std::invalid_argument("multistability_boundary: empty scan");
  }
  if (o.xi_max < 12.0) {
    o.xi_max = 12.0;
  }
  auto count = [&](double power) { return limit_cycle_solve(with_pump_power(p, power), o).roots.size(); };

  MultistabilityResult r;
  double prev = power_lo;
  for (double power = power_lo; power <= power_hi + 0.5 * resolution; power += resolution) {
    if (count(power) >= 2) {
      double lo = prev;
      double hi = power;
      while (hi - lo > resolution / 64.0) {
        const double mid = 0.5 * (lo + hi);
        (count(mid) >= 2 ? hi : lo) = mid;
      }
      r.found = true;
      r.power = hi;
      r.roots_at_power = count(hi);
      return r;
    }
    prev = power;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Second mode driven by the first mode's limit cycle

struct SecondModeSteady
{
  bool stable = false;            ///< gamma_2^eff > 0
  double gamma_eff = 0.0;         ///< rad/s
  double delta_eff = 0.0;         ///< Delta omega - Re d_2, rad/s
  double delta_bar_eff = 0.0;     ///< Delta omega + Re(d_1 - d_2), rad/s
  double sync_amplitude = 0.0;    ///< |i d_12 I_1 / (gamma_2^eff + i delta_bar)|
  double enhancement = 0.0;       ///< sqrt(gamma_2 / gamma_2^eff)
  double thermal_amplitude = 0.0; ///< q_th,2 sqrt(gamma_2 / gamma_2^eff), m
  double thermal_amplitude_dimless = 0.0; ///< sqrt(n_2 gamma_2 / gamma_2^eff)
  NonlinearCoeffs coeffs;
  double literal_sync_ratio = 0.0;  ///< |d_12|^2 I_1^2 / (gamma_2 gamma_2^eff n_2)
  double sync_to_thermal = 0.0;     ///< sync_amplitude^2 / thermal_amplitude_dimless^2
  bool full_sync = false;           ///< sync_to_thermal >= 10
};

/**
 * @brief Stationary second mode with mode 1 on its limit cycle, omega_ref = omega_1.
 */
inline SecondModeSteady second_mode_steady(const SystemParams & p, const LimitCycleSolution & lc, int M = 0)
{
  if (!lc.found || lc.mode != 0) {
    throw std::invalid_argument("second_mode_steady: needs a stable mode-1 limit cycle");
  }
  SecondModeSteady s;
  const auto & m2 = p.mech[1];
  const double I1 = lc.amplitude;
  s.coeffs = nonlinear_coeffs(cplx(I1, 0.0), cplx(0.0, 0.0), p, drive_squared(p), p.mech[0].omega, M);
  const double dw = m2.omega - p.mech[0].omega;
  s.gamma_eff = m2.gamma + s.coeffs.d2.imag();
  s.delta_eff = dw - s.coeffs.d2.real();
  s.delta_bar_eff = dw + (s.coeffs.d1 - s.coeffs.d2).real();
  s.stable = s.gamma_eff > 0.0;
  if (!s.stable) {
    return s;
  }
  s.sync_amplitude = std::abs(cplx(0.0, 1.0) * s.coeffs.d12 * I1 / cplx(s.gamma_eff, s.delta_bar_eff));
  s.enhancement = std::sqrt(m2.gamma / s.gamma_eff);
  s.thermal_amplitude = m2.q_thermal() * s.enhancement;
  s.thermal_amplitude_dimless = std::sqrt(m2.n_thermal()) * s.enhancement;
  s.literal_sync_ratio = std::norm(s.coeffs.d12) * I1 * I1 / (m2.gamma * s.gamma_eff * m2.n_thermal());
  s.sync_to_thermal = s.sync_amplitude * s.sync_amplitude /
                      (s.thermal_amplitude_dimless * s.thermal_amplitude_dimless);
  s.full_sync = s.sync_to_thermal >= 10.0;
  return s;
}

/**
 * @brief Centred sliding mean of cos(theta_1 - theta_2) over @p window samples.
 *
 * Output k is the window starting at sample k (centre k + window/2).
 */
inline std::vector<double> sync_measure(
  const std::vector<double> & theta1, const std::vector<double> & theta2, std::size_t window)
{
  if (theta1.size() != theta2.size()) {
    throw std::invalid_argument("sync_measure: phase series differ in length");
  }
  if (window < 10) {
    throw std::invalid_argument("sync_measure: window must cover at least 10 samples");
  }
  if (window > theta1.size()) {
    throw std::invalid_argument("sync_measure: window exceeds series length");
  }
  std::vector<double> c(theta1.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = std::cos(theta1[k] - theta2[k]);
  }
  std::vector<double> out(c.size() - window + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < window; ++k) {
    acc += c[k];
  }
  out[0] = acc / static_cast<double>(window);
  for (std::size_t k = 1; k < out.size(); ++k) {
    acc += c[k + window - 1] - c[k - 1];
    // Re-sum periodically to stop rounding drift.
    if (k % 65536 == 0) {
      acc = 0.0;
      for (std::size_t q = k; q < k + window; ++q) {
        acc += c[q];
      }
    }
    out[k] = acc / static_cast<double>(window);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Amplitude-equation integration

struct SlowSample
{
  double t = 0.0;
  cplx A1{};
  cplx A2{};
};

struct SlowTrajectory
{
  double omega_ref = 0.0;
  double dt = 0.0;  ///< spacing of stored samples
  std::uint64_t seed = 0;
  std::vector<SlowSample> samples;
};

struct SlowflowOptions
{
  double dt = 10e-6;
  double duration = 1.0;
  std::size_t decimation = 100;
  std::uint64_t seed = 0;
  int truncation = 0;
};

namespace detail
{

/// exp(K t) for a 2x2 complex matrix, closed form.
inline std::array<cplx, 4> expm2(const std::array<cplx, 4> & K, double t)
{
  const cplx s = 0.5 * (K[0] + K[3]);
  const cplx h = 0.5 * (K[0] - K[3]);
  const cplx q = std::sqrt(h * h + K[1] * K[2]);
  const cplx qt = q * t;
  const cplx ch = std::cosh(qt);
  const cplx sh_over_q = std::abs(qt) < 1e-4 ? t * (1.0 + qt * qt / 6.0) : std::sinh(qt) / q;
  const cplx e = std::exp(s * t);
  return {e * (ch + sh_over_q * h), e * sh_over_q * K[1], e * sh_over_q * K[2], e * (ch - sh_over_q * h)};
}

}  // namespace detail

/// Largest slow step: 0.02 over the fastest damping or coupling rate.
inline double slowflow_max_dt(const SystemParams & p, const NonlinearCoeffs & c)
{
  const double rate = std::max({p.mech[0].gamma, p.mech[1].gamma, std::abs(c.d1), std::abs(c.d2), std::abs(c.d12)});
  return 0.02 / rate;
}

/**
 * @brief Integrate the amplitude equations with omega_ref = omega_1.
 *
 * Each step re-evaluates d_1, d_2, d_12 at the current amplitudes, advances the
 * linear 2x2 system with those coefficients exactly, and adds the thermal input
 * with the exact Ornstein-Uhlenbeck increment variance. Pump power follows @p sched.
 */
template <typename Sink>
void integrate_amplitude_eqs(
  const SystemParams & p, cplx A1, cplx A2, const DriveSchedule & sched, const SlowflowOptions & o, Sink && sink)
{
  if (!(o.dt > 0.0) || !(o.duration > 0.0) || o.decimation == 0) {
    throw std::invalid_argument("integrate_amplitude_eqs: dt, duration and decimation must be positive");
  }
  sched.validate();
  const double omega_ref = p.mech[0].omega;
  const std::array<double, 2> dw{p.mech[0].omega - omega_ref, p.mech[1].omega - omega_ref};
  const std::array<double, 2> gam{p.mech[0].gamma, p.mech[1].gamma};
  std::array<ThermalNoise, 2> noise{
    ThermalNoise(o.seed, 0, p.mech[0].n_thermal(), o.dt),
    ThermalNoise(o.seed, 1, p.mech[1].n_thermal(), o.dt)};
  // Increment variance of the exact Ornstein-Uhlenbeck step, so the stationary
  // variance does not depend on dt.
  const std::array<double, 2> noise_gain{ou_noise_gain(gam[0], o.dt), ou_noise_gain(gam[1], o.dt)};
  const double pump_e2_per_w = std::pow(p.opt[kPump].drive_rate(1.0), 2);
  const double probe_e2 = std::pow(p.opt[kProbe].drive_rate(), 2);
  const bool coupled = p.g(0, 0) != 0.0 || p.g(0, 1) != 0.0 || p.g(1, 0) != 0.0 || p.g(1, 1) != 0.0;

  const auto n_steps = static_cast<std::uint64_t>(std::llround(o.duration / o.dt));
  const cplx I(0.0, 1.0);
  double t = 0.0;
  sink(SlowSample{t, A1, A2});
  for (std::uint64_t step = 1; step <= n_steps; ++step) {
    NonlinearCoeffs c;
    if (coupled) {
      const std::array<double, 2> e2{pump_e2_per_w * sched.power_at(t), probe_e2};
      c = nonlinear_coeffs(A1, A2, p, e2, omega_ref, o.truncation);
      if (step == 1 && o.dt > slowflow_max_dt(p, c)) {
        throw std::invalid_argument("integrate_amplitude_eqs: dt above 0.02 / fastest rate");
      }
    }
    const std::array<cplx, 4> K{
      cplx(-gam[0], -dw[0]) + I * c.d1, I * c.d12,
      I * c.d12, cplx(-gam[1], -dw[1]) + I * c.d2};
    const auto E = detail::expm2(K, o.dt);
    const cplx n1 = A1;
    A1 = E[0] * n1 + E[1] * A2 + noise_gain[0] * noise[0]();
    A2 = E[2] * n1 + E[3] * A2 + noise_gain[1] * noise[1]();
    t = static_cast<double>(step) * o.dt;
    if (!(std::max(std::norm(A1), std::norm(A2)) < 1e24)) {
      throw NumericalError("amplitude equations diverged", t);
    }
    if (step % o.decimation == 0) {
      sink(SlowSample{t, A1, A2});
    }
  }
}

inline SlowTrajectory integrate_amplitude_eqs(
  const SystemParams & p, cplx A1, cplx A2, const DriveSchedule & sched, const SlowflowOptions & o)
{
  SlowTrajectory traj;
  traj.omega_ref = p.mech[0].omega;
  traj.dt = o.dt * static_cast<double>(o.decimation);
  traj.seed = o.seed;
  integrate_amplitude_eqs(p, A1, A2, sched, o, [&](const SlowSample & s) { traj.samples.push_back(s); });
  return traj;
}

}  // namespace memdyn

#endif  // MEMDYN_SLOWFLOW_HPP_
