#include <gtest/gtest.h>

#include <cmath>

#include "memdyn/noise.hpp"

using namespace memdyn;

TEST(Noise, ComponentVariance)
{
  const double nbar = 2.5e7;
  const double dt = 2e-8;
  const std::size_t n = 1000000;
  const auto s = thermal_noise_stream(11, nbar, dt, n);
  double re2 = 0.0;
  double im2 = 0.0;
  double cross = 0.0;
  for (const auto & z : s) {
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  const double expected = (nbar + 0.5) / (2.0 * dt);
  EXPECT_NEAR(re2 / n / expected, 1.0, 0.01);
  EXPECT_NEAR(im2 / n / expected, 1.0, 0.01);
  EXPECT_NEAR(cross / n / expected, 0.0, 0.01);
}

TEST(Noise, DegenerateVariance)
{
  for (const auto & z : thermal_noise_stream(1, -0.5, 1e-6, 100)) {
    EXPECT_EQ(z, std::complex<double>(0.0, 0.0));
  }
}

TEST(Noise, Deterministic)
{
  EXPECT_EQ(thermal_noise_stream(42, 10.0, 1e-3, 1000), thermal_noise_stream(42, 10.0, 1e-3, 1000));
  EXPECT_NE(thermal_noise_stream(42, 10.0, 1e-3, 10), thermal_noise_stream(43, 10.0, 1e-3, 10));
  EXPECT_NE(thermal_noise_stream(42, 10.0, 1e-3, 10, 0), thermal_noise_stream(42, 10.0, 1e-3, 10, 1));
}
