#ifndef MEMDYN_NOISE_HPP_
#define MEMDYN_NOISE_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace memdyn
{

/**
 * @brief Discretised white thermal input beta_in for one mechanical mode.
 *
 * Each sample holds independent real and imaginary parts of variance
 * (n + 1/2) / (2 dt), the discrete stand-in for
 * <beta_in*(t) beta_in(t')> = (n + 1/2) delta(t - t').
 * Streams are keyed by (seed, stream) so modes never share draws.
 */
class ThermalNoise
{
public:
  ThermalNoise(std::uint64_t seed, std::uint64_t stream, double n_thermal, double dt)
  : sigma_(std::sqrt(std::max(0.0, n_thermal + 0.5) / (2.0 * dt)))
  {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double sigma() const noexcept { return sigma_; }

  std::complex<double> operator()()
  {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {sigma_ * re, sigma_ * im};
  }

  /// Standard complex Gaussian with E|z|^2 = 2 var_per_component.
  std::complex<double> gaussian(double var_per_component)
  {
    const double s = std::sqrt(std::max(0.0, var_per_component));
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
  }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double sigma_;
};

/// n_steps consecutive samples of one thermal input stream.
/**
 * @brief Gain g such that g * ThermalNoise(dt)() has the increment variance of an
 * exact Ornstein-Uhlenbeck step of damping gamma: (n + 1/2)(1 - e^{-2 gamma dt}).
 *
 * Tends to sqrt(2 gamma) dt (Euler-Maruyama) for gamma dt -> 0.
 */
inline double ou_noise_gain(double gamma, double dt)
{
  const double x = 2.0 * gamma * dt;
  const double ratio = x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
  return std::sqrt(2.0 * gamma * ratio) * dt;
}

inline std::vector<std::complex<double>> thermal_noise_stream(
  std::uint64_t seed, double n_thermal, double dt, std::size_t n_steps, std::uint64_t stream = 0)
{
  ThermalNoise noise(seed, stream, n_thermal, dt);
  std::vector<std::complex<double>> out(n_steps);
  for (auto & z : out) {
    z = noise();
  }
  return out;
}

}  // namespace memdyn

#endif  // MEMDYN_NOISE_HPP_
