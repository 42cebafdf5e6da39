#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/periodic_oracle.hpp"
#include "common.hpp"

using namespace memdyn;

TEST(ResponseHarmonic, StaticMembrane)
{
  const auto & p = testutil::table1();
  EXPECT_LT(std::abs(response_harmonic(0.0, 0, 0, p) - 1.0 / (-p.probe().w())), 1e-20);
  for (const int n : {-3, -1, 1, 2}) {
    EXPECT_EQ(response_harmonic(0.0, 0, n, p), cplx(0.0, 0.0));
  }
}

TEST(ResponseHarmonic, MatchesPeriodicSteadyState)
{
  const auto & p = testutil::table1();
  const int n_max = 6;
  for (const double xi : {0.1, 0.5, 1.0, 1.66}) {
    const auto ref = oracle::periodic_harmonics(xi, p.probe().w(), p.mech[0].omega, n_max);
    double scale = 0.0;
    for (const auto & c : ref) {
      scale = std::max(scale, std::abs(c));
    }
    for (int n = -n_max; n <= n_max; ++n) {
      const cplx got = response_harmonic(xi, 0, n, p);
      EXPECT_LT(std::abs(got - ref[static_cast<std::size_t>(n + n_max)]), 1e-4 * scale) << "xi=" << xi << " n=" << n;
    }
  }
}

TEST(ResponseHarmonic, TruncationConvergence)
{
  const auto & p = testutil::table1();
  for (const double xi : {0.5, 1.05, 1.66}) {
    const int M = default_truncation(xi);
    for (const int n : {0, 1, 2, -2}) {
      const cplx a = response_harmonic(xi, 0, n, p, M);
      const cplx b = response_harmonic(xi, 0, n, p, M + 10);
      EXPECT_LT(std::abs(a - b), 1e-10 * std::abs(b));
    }
  }
}

TEST(Reflection, ResonantStaticCavity)
{
  auto p = testutil::table1();
  p.opt[kProbe].detuning = 0.0;
  p.modulation.depth = 0.0;
  const auto rs = reflection_set(0.0, 0.0, p);
  EXPECT_NEAR(rs.dc().real(), -1.0 + 2.0 * p.probe().kappa_in / p.probe().kappa(), 1e-14);
  EXPECT_NEAR(rs.dc().real(), -0.751, 1e-3);
  EXPECT_NEAR(rs.dc().imag(), 0.0, 1e-14);
}

TEST(Reflection, LinearMechanicalSideband)
{
  const auto & p = testutil::table1();
  const double xi = 1e-3;
  const cplx W = p.probe().w();
  const double w1 = p.mech[0].omega;
  const double j0 = std::cyl_bessel_j(0.0, p.modulation.depth);
  const double k2 = 2.0 * p.probe().kappa_in;
  const cplx linear = j0 * k2 * 0.5 * xi * (1.0 / (-W) - 1.0 / (cplx(0.0, w1) - W));
  const auto rs = reflection_set(xi, 0.0, p);
  EXPECT_LT(std::abs(rs[ToneId::Omega1].plus - linear), 1e-3 * std::abs(linear));
}

TEST(Reflection, Passive)
{
  auto p = testutil::table1();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> det(-3e5, 3e5);
  for (int k = 0; k < 50; ++k) {
    p.opt[kProbe].detuning = hz_to_rad(det(rng));
    for (const double xi : {0.0, 0.4, 1.05, 2.0, 3.0}) {
      EXPECT_LE(std::abs(reflection_set(xi, 0.0, p).dc()), 1.0 + 1e-12);
    }
  }
}

TEST(Reflection, SecondModeLinear)
{
  const auto & p = testutil::table1();
  const auto a = reflection_set(1.05, 10.0, p);
  const auto b = reflection_set(1.05, 30.0, p);
  for (const auto id : {ToneId::Omega2, ToneId::OmegaSM}) {
    EXPECT_LT(std::abs(b[id].plus - 3.0 * a[id].plus), 1e-12 * std::abs(b[id].plus));
    EXPECT_LT(std::abs(b[id].minus - 3.0 * a[id].minus), 1e-12 * std::abs(b[id].minus));
  }
  for (const auto id : {ToneId::DC, ToneId::Omega1, ToneId::OmegaB, ToneId::OmegaSB}) {
    EXPECT_EQ(a[id].plus, b[id].plus);
  }
  const auto z = reflection_set(1.05, 0.0, p);
  EXPECT_EQ(z[ToneId::Omega2].plus, cplx(0.0, 0.0));
}

TEST(Reflection, CalibrationToneScalesWithBessel)
{
  auto p = testutil::table1();
  p.modulation.depth = 0.02;
  const auto a = reflection_set(1.05, 0.0, p);
  p.modulation.depth = 0.1;
  const auto b = reflection_set(1.05, 0.0, p);
  const cplx ra = a[ToneId::OmegaB].plus / std::cyl_bessel_j(1.0, 0.02);
  const cplx rb = b[ToneId::OmegaB].plus / std::cyl_bessel_j(1.0, 0.1);
  EXPECT_LT(std::abs(ra - rb), 1e-12 * std::abs(ra));
}

TEST(Reconstruction, StaticIsConstant)
{
  auto p = testutil::table1();
  p.modulation.depth = 0.0;
  const auto rs = reflection_set(0.0, 0.0, p);
  const std::vector<double> t{0.0, 1e-6, 3.7e-5, 0.01};
  for (const auto & z : reconstruct_reflection_time_series(rs, {}, t, p)) {
    EXPECT_EQ(z, rs.dc());
  }
}

TEST(Reconstruction, SpectrumHasOnlyTheTones)
{
  const auto & p = testutil::table1();
  const auto rs = reflection_set(1.05, 20.0, p);
  const double fs = 1e6;
  const std::size_t n = 1 << 17;
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = static_cast<double>(k) / fs;
  }
  const auto r = reconstruct_reflection_time_series(rs, {0.3, 1.1, -0.4, 2.0}, t, p);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = r[k].imag();
  }
  const auto psd = welch_psd(x, fs, 1 << 15);
  std::vector<double> tones{0.0};
  for (const auto id : {ToneId::Omega1, ToneId::Omega2, ToneId::OmegaSM, ToneId::OmegaB, ToneId::OmegaSB}) {
    tones.push_back(rad_to_hz(tone_frequency(id, p)));
  }
  double peak = 0.0;
  for (const double v : psd.power) {
    peak = std::max(peak, v);
  }
  for (std::size_t k = 1; k < psd.freq.size(); ++k) {
    bool near = false;
    for (const double f : tones) {
      near = near || std::abs(psd.freq[k] - f) < 500.0;
    }
    if (!near) {
      ASSERT_LT(psd.power[k], 1e-7 * peak) << "f=" << psd.freq[k];
    }
  }
  for (const double f : std::vector<double>(tones.begin() + 1, tones.end())) {
    EXPECT_GT(band_variance(psd, f - 100.0, f + 100.0), 0.0);
  }
}
