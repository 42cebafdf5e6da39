#ifndef MEMDYN_CAVITY_RESPONSE_HPP_
#define MEMDYN_CAVITY_RESPONSE_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "memdyn/bessel.hpp"
#include "memdyn/model.hpp"
#include "memdyn/slowflow.hpp"

namespace memdyn
{

enum class ToneId
{
  DC = 0,
  Omega1,
  Omega2,
  OmegaSM,  ///< 2 omega_1 - omega_2
  OmegaB,
  OmegaSB,  ///< 2 omega_1 - omega_b
};

inline constexpr std::array<ToneId, 6> kAllTones{
  ToneId::DC, ToneId::Omega1, ToneId::Omega2, ToneId::OmegaSM, ToneId::OmegaB, ToneId::OmegaSB};

inline std::string tone_name(ToneId id)
{
  switch (id) {
    case ToneId::DC: return "dc";
    case ToneId::Omega1: return "omega1";
    case ToneId::Omega2: return "omega2";
    case ToneId::OmegaSM: return "omega_sm";
    case ToneId::OmegaB: return "omega_b";
    case ToneId::OmegaSB: return "omega_sb";
  }
  return "?";
}

/// Angular frequency of a tone, rad/s.
inline double tone_frequency(ToneId id, const SystemParams & p)
{
  const double w1 = p.mech[0].omega;
  const double w2 = p.mech[1].omega;
  const double wb = p.modulation.omega;
  switch (id) {
    case ToneId::DC: return 0.0;
    case ToneId::Omega1: return w1;
    case ToneId::Omega2: return w2;
    case ToneId::OmegaSM: return 2.0 * w1 - w2;
    case ToneId::OmegaB: return wb;
    case ToneId::OmegaSB: return 2.0 * w1 - wb;
  }
  return 0.0;
}

struct TonePair
{
  cplx plus{};
  cplx minus{};
};

/**
 * @brief Reflection coefficients R+/- at the six tones, and the inputs that produced them.
 *
 * The DC term is stored in dc; its pair slot holds (R_DC, 0).
 */
struct ReflectionSet
{
  std::array<TonePair, 6> tones{};
  double xi = 0.0;
  double g2A2 = 0.0;
  double mod_depth = 0.0;

  const TonePair & operator[](ToneId id) const { return tones[static_cast<std::size_t>(id)]; }
  TonePair & operator[](ToneId id) { return tones[static_cast<std::size_t>(id)]; }
  cplx dc() const { return (*this)[ToneId::DC].plus; }
};

namespace detail
{

/// Bessel table J_n(-xi) wide enough for harmonic |n| <= n_max with sums over |m| <= M.
inline BesselTable response_table(double xi, int M, int n_max) { return BesselTable(-xi, M + n_max + 1); }

}  // namespace detail

/**
 * @brief Coefficient of e^{i n (omega_1 t + phi_1)} in C_b(xi):
 * sum_m J_{m-n}(-xi) J_m(-xi) / [i (m omega_1 + b omega_b) - W], W of the probe mode.
 */
inline cplx response_harmonic(double xi, int b, int n, const SystemParams & p, int M = 0)
{
  M = detail::checked_truncation(xi, M);
  if (std::abs(n) > M) {
    throw std::invalid_argument("response_harmonic: |n| exceeds truncation");
  }
  const BesselTable j = detail::response_table(xi, M, std::abs(n));
  const cplx W = p.probe().w();
  const double w1 = p.mech[0].omega;
  const double wb = p.modulation.omega;
  cplx sum{};
  for (int m = -M; m <= M; ++m) {
    const double num = j(m - n) * j(m);
    if (num != 0.0) {
      sum += num / (cplx(0.0, m * w1 + b * wb) - W);
    }
  }
  return sum;
}

/**
 * @brief First-order companion: sum_m J_{m-n} J_m / ([i(m w1 + b wb) - W][i(m w1 + b wb + s w2) - W]), s = +/-1.
 */
inline cplx response_harmonic_first_order(double xi, int b, int n, int s, const SystemParams & p, int M = 0)
{
  M = detail::checked_truncation(xi, M);
  const BesselTable j = detail::response_table(xi, M, std::abs(n));
  const cplx W = p.probe().w();
  const double w1 = p.mech[0].omega;
  const double w2 = p.mech[1].omega;
  const double wb = p.modulation.omega;
  cplx sum{};
  for (int m = -M; m <= M; ++m) {
    const double num = j(m - n) * j(m);
    if (num != 0.0) {
      const double f = m * w1 + b * wb;
      sum += num / ((cplx(0.0, f) - W) * (cplx(0.0, f + s * w2) - W));
    }
  }
  return sum;
}

/**
 * @brief Assemble the six tone pairs at modulation index xi and second-mode product g2A2 [rad/s].
 */
inline ReflectionSet reflection_set(double xi, double g2A2, const SystemParams & p, int M = 0)
{
  M = detail::checked_truncation(xi, M);
  ReflectionSet rs;
  rs.xi = xi;
  rs.g2A2 = g2A2;
  rs.mod_depth = p.modulation.depth;

  const double beta = p.modulation.depth;
  const double j0 = std::cyl_bessel_j(0.0, beta);
  const double j1 = -std::cyl_bessel_j(1.0, beta);  // J_1(-beta)
  const double jm1 = -j1;                           // J_{-1}(-beta)
  const double k2 = 2.0 * p.probe().kappa_in;
  const cplx pert = cplx(0.0, g2A2 / std::sqrt(2.0));

  rs[ToneId::DC] = {j0 * (-1.0 + k2 * response_harmonic(xi, 0, 0, p, M)), {}};
  rs[ToneId::Omega1] = {j0 * k2 * response_harmonic(xi, 0, 1, p, M), j0 * k2 * response_harmonic(xi, 0, -1, p, M)};
  rs[ToneId::Omega2] = {
    j0 * k2 * pert * response_harmonic_first_order(xi, 0, 0, +1, p, M),
    j0 * k2 * pert * response_harmonic_first_order(xi, 0, 0, -1, p, M)};
  rs[ToneId::OmegaSM] = {
    j0 * k2 * pert * response_harmonic_first_order(xi, 0, 2, -1, p, M),
    j0 * k2 * pert * response_harmonic_first_order(xi, 0, -2, +1, p, M)};
  rs[ToneId::OmegaB] = {
    j1 * (-1.0 + k2 * response_harmonic(xi, 1, 0, p, M)),
    jm1 * (-1.0 + k2 * response_harmonic(xi, -1, 0, p, M))};
  rs[ToneId::OmegaSB] = {jm1 * k2 * response_harmonic(xi, -1, 2, p, M), j1 * k2 * response_harmonic(xi, 1, -2, p, M)};
  return rs;
}

struct TonePhases
{
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi_sm = 0.0;
  double phi_sb = 0.0;
};

/**
 * @brief Six-tone superposition R(t) on the given time grid.
 *
 * The calibration-tone line uses R-(omega_b) for the negative-frequency term.
 */
inline std::vector<cplx> reconstruct_reflection_time_series(
  const ReflectionSet & rs, const TonePhases & ph, const std::vector<double> & t, const SystemParams & p)
{
  struct Line
  {
    ToneId id;
    double phase;
  };
  const std::array<Line, 5> lines{{
    {ToneId::Omega1, ph.phi1}, {ToneId::Omega2, ph.phi2}, {ToneId::OmegaSM, ph.phi_sm},
    {ToneId::OmegaB, 0.0}, {ToneId::OmegaSB, ph.phi_sb}}};
  std::vector<cplx> out(t.size(), rs.dc());
  for (const auto & line : lines) {
    const double w = tone_frequency(line.id, p);
    const auto & pair = rs[line.id];
    if (pair.plus == cplx{} && pair.minus == cplx{}) {
      continue;
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
      const cplx e = std::polar(1.0, w * t[k] + line.phase);
      out[k] += pair.plus * e + pair.minus * std::conj(e);
    }
  }
  return out;
}

}  // namespace memdyn

#endif  // MEMDYN_CAVITY_RESPONSE_HPP_
