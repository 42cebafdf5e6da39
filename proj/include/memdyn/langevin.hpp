#ifndef MEMDYN_LANGEVIN_HPP_
#define MEMDYN_LANGEVIN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "memdyn/model.hpp"
#include "memdyn/noise.hpp"

namespace memdyn
{

/**
 * @brief Piecewise-constant pump power. Segment k holds from t_start[k] to t_start[k+1].
 */
struct DriveSchedule
{
  std::vector<std::pair<double, double>> segments;  ///< (t_start [s], pump power [W])
  double end = 0.0;  ///< total length when parsed from durations, 0 if open-ended

  /// Constant pump power from t = 0.
  static DriveSchedule constant(double power) { return DriveSchedule{{{0.0, power}}, 0.0}; }

  void validate() const
  {
    for (std::size_t k = 0; k < segments.size(); ++k) {
      if (segments[k].second < 0.0) {
        throw std::invalid_argument("schedule: negative pump power");
      }
      if (k > 0 && !(segments[k].first > segments[k - 1].first)) {
        throw std::invalid_argument("schedule: start times must be strictly increasing");
      }
    }
  }

  /// Pump power at time t; zero before the first segment.
  double power_at(double t) const
  {
    double p = 0.0;
    for (const auto & [start, power] : segments) {
      if (t >= start) {
        p = power;
      } else {
        break;
      }
    }
    return p;
  }
};

namespace detail
{

inline double parse_power(const std::string & tok)
{
  if (tok == "off") {
    return 0.0;
  }
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  const std::string unit = tok.substr(used);
  if (unit == "W" || unit.empty()) {
    return v;
  }
  if (unit == "mW") {
    return v * 1e-3;
  }
  if (unit == "uW") {
    return v * 1e-6;
  }
  if (unit == "nW") {
    return v * 1e-9;
  }
  throw std::invalid_argument("schedule: unknown power unit '" + unit + "'");
}

}  // namespace detail

/**
 * @brief Parse "off:10,4.25uW:15,6.0uW:25": comma-separated power:duration segments.
 */
inline DriveSchedule parse_schedule(const std::string & spec)
{
  DriveSchedule s;
  std::stringstream ss(spec);
  std::string item;
  double t = 0.0;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("schedule: segment '" + item + "' is not power:duration");
    }
    double duration = 0.0;
    double power = 0.0;
    try {
      power = detail::parse_power(item.substr(0, colon));
      duration = std::stod(item.substr(colon + 1));
    } catch (const std::logic_error &) {
      throw std::invalid_argument("schedule: bad segment '" + item + "'");
    }
    if (!(duration > 0.0)) {
      throw std::invalid_argument("schedule: non-positive duration in '" + item + "'");
    }
    s.segments.emplace_back(t, power);
    t += duration;
  }
  if (s.segments.empty()) {
    throw std::invalid_argument("schedule: empty");
  }
  s.end = t;
  s.validate();
  return s;
}

/// E exp[-i beta sin(omega_b t)].
inline cplx probe_input(double t, double drive, const ProbeModulation & mod)
{
  if (mod.depth == 0.0) {
    return {drive, 0.0};
  }
  return drive * std::polar(1.0, -mod.depth * std::sin(mod.omega * t));
}

struct LangevinSample
{
  double t = 0.0;
  std::array<cplx, 2> alpha{};
  std::array<cplx, 2> beta{};
};

struct Trajectory
{
  double dt = 0.0;          ///< spacing of stored samples, s
  std::uint64_t seed = 0;
  std::vector<LangevinSample> samples;
};

struct LangevinOptions
{
  double dt = 20e-9;
  double duration = 1.0;
  std::size_t decimation = 25;
  std::uint64_t seed = 0;
  bool thermal_initial = true;  ///< draw beta(0) from equilibrium, else beta(0) = beta_0
  std::array<cplx, 2> initial_offset{};  ///< added to beta(0)
};

/// Largest step allowed by the resolution guard.
inline double langevin_max_dt(const SystemParams & p)
{
  double fastest = std::max(p.mech[0].omega, p.mech[1].omega);
  for (const auto & o : p.opt) {
    fastest = std::max({fastest, std::abs(o.bare_detuning), std::abs(o.detuning), o.kappa()});
  }
  return 1.0 / (25.0 * fastest / kTwoPi);
}

/**
 * @brief Integrate the classical Langevin equations, streaming every
 * decimation-th state to @p sink.
 *
 * Linear parts advance with exact exponentials. The optical step freezes the
 * mechanically shifted detuning at its half-step value; the radiation-pressure
 * force on the membranes is averaged over the step (trapezoid); the thermal
 * input carries the exact Ornstein-Uhlenbeck increment variance.
 */
template <typename Sink>
void simulate_langevin(const SystemParams & p, const DriveSchedule & sched, const LangevinOptions & opt, Sink && sink)
{
  if (!(opt.dt > 0.0) || !(opt.duration > 0.0) || opt.decimation == 0) {
    throw std::invalid_argument("simulate_langevin: dt, duration and decimation must be positive");
  }
  if (opt.dt > langevin_max_dt(p)) {
    throw std::invalid_argument(
      "simulate_langevin: dt above resolution guard " + std::to_string(langevin_max_dt(p)) + " s");
  }
  sched.validate();

  const double dt = opt.dt;
  const auto n_steps = static_cast<std::uint64_t>(std::llround(opt.duration / dt));

  std::array<ThermalNoise, 2> noise{
    ThermalNoise(opt.seed, 0, p.mech[0].n_thermal(), dt),
    ThermalNoise(opt.seed, 1, p.mech[1].n_thermal(), dt)};

  std::array<cplx, 2> mech_decay{};
  std::array<cplx, 2> mech_half{};
  std::array<cplx, 2> mech_phi{};       // (e^{lambda dt} - 1) / lambda
  std::array<cplx, 2> mech_phi_half{};
  std::array<double, 2> noise_gain{};
  for (std::size_t j = 0; j < 2; ++j) {
    const cplx lambda(-p.mech[j].gamma, -p.mech[j].omega);
    mech_decay[j] = std::exp(lambda * dt);
    mech_half[j] = std::exp(lambda * (0.5 * dt));
    mech_phi[j] = (mech_decay[j] - 1.0) / lambda;
    mech_phi_half[j] = (mech_half[j] - 1.0) / lambda;
    noise_gain[j] = ou_noise_gain(p.mech[j].gamma, dt);
  }

  std::array<double, 2> kappa{p.opt[0].kappa(), p.opt[1].kappa()};
  std::array<double, 2> bare{p.opt[0].bare_detuning, p.opt[1].bare_detuning};
  const double probe_drive = p.opt[kProbe].drive_rate();
  const double pump_e_per_sqrt_w = p.opt[kPump].drive_rate(1.0);

  std::array<cplx, 2> alpha{};
  std::array<cplx, 2> beta{p.static_shift[0] + opt.initial_offset[0], p.static_shift[1] + opt.initial_offset[1]};
  if (opt.thermal_initial) {
    for (std::size_t j = 0; j < 2; ++j) {
      beta[j] += noise[j].gaussian(0.5 * (p.mech[j].n_thermal() + 0.5));
    }
  }

  const bool any_modulation = p.modulation.depth != 0.0;
  double t = 0.0;
  sink(LangevinSample{t, alpha, beta});

  std::array<double, 2> photons{std::norm(alpha[0]), std::norm(alpha[1])};
  for (std::uint64_t step = 1; step <= n_steps; ++step) {
    const double t_mid = t + 0.5 * dt;
    const double pump_drive = pump_e_per_sqrt_w * std::sqrt(sched.power_at(t_mid));

    std::array<cplx, 2> beta_mid{};
    for (std::size_t j = 0; j < 2; ++j) {
      const double force = p.mech[j].g[0] * photons[0] + p.mech[j].g[1] * photons[1];
      beta_mid[j] = beta[j] * mech_half[j] + cplx(0.0, force) * mech_phi_half[j];
    }

    for (std::size_t i = 0; i < 2; ++i) {
      const double shift = 2.0 * (p.mech[0].g[i] * beta_mid[0].real() + p.mech[1].g[i] * beta_mid[1].real());
      const cplx l(-kappa[i], bare[i] + shift);
      const cplx decay = std::exp(l * dt);
      const cplx drive = i == kPump ? cplx(pump_drive, 0.0)
                                    : (any_modulation ? probe_input(t_mid, probe_drive, p.modulation) : cplx(probe_drive, 0.0));
      alpha[i] = alpha[i] * decay + drive * (decay - 1.0) / l;
    }

    const std::array<double, 2> photons_next{std::norm(alpha[0]), std::norm(alpha[1])};
    for (std::size_t j = 0; j < 2; ++j) {
      const double force = 0.5 * (p.mech[j].g[0] * (photons[0] + photons_next[0]) +
                                  p.mech[j].g[1] * (photons[1] + photons_next[1]));
      beta[j] = beta[j] * mech_decay[j] + cplx(0.0, force) * mech_phi[j] + noise_gain[j] * noise[j]();
    }
    photons = photons_next;
    t = static_cast<double>(step) * dt;

    const double big = std::max({photons[0], photons[1], std::norm(beta[0]), std::norm(beta[1])});
    if (!(big < 1e24)) {
      throw NumericalError("Langevin integration diverged", t);
    }
    if (step % opt.decimation == 0) {
      sink(LangevinSample{t, alpha, beta});
    }
  }
}

/// Convenience overload that stores the decimated trajectory in memory.
inline Trajectory simulate_langevin(const SystemParams & p, const DriveSchedule & sched, const LangevinOptions & opt)
{
  Trajectory traj;
  traj.dt = opt.dt * static_cast<double>(opt.decimation);
  traj.seed = opt.seed;
  traj.samples.reserve(static_cast<std::size_t>(opt.duration / traj.dt) + 2);
  simulate_langevin(p, sched, opt, [&](const LangevinSample & s) { traj.samples.push_back(s); });
  return traj;
}

/// e_out = -e_in exp[-i beta sin(omega_b t)] + sqrt(2 kappa_in) alpha_probe, in sqrt(photons/s).
inline cplx output_field(const LangevinSample & s, const SystemParams & p)
{
  const auto & probe = p.probe();
  return -probe_input(s.t, probe.input_amplitude(), p.modulation) + std::sqrt(2.0 * probe.kappa_in) * s.alpha[kProbe];
}

inline std::vector<cplx> output_field(const Trajectory & traj, const SystemParams & p)
{
  std::vector<cplx> out;
  out.reserve(traj.samples.size());
  for (const auto & s : traj.samples) {
    out.push_back(output_field(s, p));
  }
  return out;
}

/// Reflection R(t) = e_out / e_in of the probe port.
inline cplx reflection(const LangevinSample & s, const SystemParams & p)
{
  return output_field(s, p) / p.probe().input_amplitude();
}

}  // namespace memdyn

#endif  // MEMDYN_LANGEVIN_HPP_
