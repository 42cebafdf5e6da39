#ifndef MEMDYN_TESTS_PERIODIC_ORACLE_HPP_
#define MEMDYN_TESTS_PERIODIC_ORACLE_HPP_

#include <complex>
#include <vector>

#include "memdyn/constants.hpp"

namespace oracle
{

/**
 * Harmonics c_n, |n| <= n_max, of the periodic steady state of
 * C' = (W + i xi omega cos(omega t)) C + 1, found by RK4 over one period
 * (monodromy fixes C(0)) followed by a DFT of the periodic orbit.
 */
inline std::vector<std::complex<double>> periodic_harmonics(double xi, std::complex<double> W, double omega, int n_max,
                                                            int steps = 8192)
{
  using cplx = std::complex<double>;
  const double T = memdyn::kTwoPi / omega;
  const double h = T / steps;
  auto rhs = [&](double t, cplx c, cplx src) { return (W + cplx(0.0, xi * omega * std::cos(omega * t))) * c + src; };
  auto rk4 = [&](double t, cplx c, cplx src) {
    const cplx k1 = rhs(t, c, src);
    const cplx k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1, src);
    const cplx k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2, src);
    const cplx k4 = rhs(t + h, c + h * k3, src);
    return c + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  cplx phi(1.0, 0.0);
  cplx part(0.0, 0.0);
  for (int k = 0; k < steps; ++k) {
    phi = rk4(k * h, phi, 0.0);
    part = rk4(k * h, part, 1.0);
  }
  cplx c = part / (1.0 - phi);
  std::vector<cplx> samples(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    samples[static_cast<std::size_t>(k)] = c;
    c = rk4(k * h, c, 1.0);
  }
  std::vector<cplx> out;
  for (int n = -n_max; n <= n_max; ++n) {
    cplx acc{};
    for (int k = 0; k < steps; ++k) {
      acc += samples[static_cast<std::size_t>(k)] * std::polar(1.0, -memdyn::kTwoPi * n * k / steps);
    }
    out.push_back(acc / static_cast<double>(steps));
  }
  return out;
}

}  // namespace oracle

#endif  // MEMDYN_TESTS_PERIODIC_ORACLE_HPP_
