#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "common.hpp"

using namespace memdyn;

namespace
{

const SystemParams & pumped()
{
  static const SystemParams p = with_pump_power(testutil::table1(), 4.25e-6);
  return p;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Sigma, DetuningReflection)
{
  // n -> -(n+1) maps the sum at -Delta onto minus the sum at Delta.
  const auto & p = pumped();
  const double w = p.mech[0].omega;
  for (const double xi : {0.3, 1.05, 2.4}) {
    for (const auto & o : p.opt) {
      const cplx a = sigma(xi, o.kappa(), o.detuning, w, 60);
      const cplx b = sigma(xi, o.kappa(), -o.detuning, w, 60);
      EXPECT_LT(std::abs(a + b), 1e-12 * std::abs(a)) << "xi=" << xi;
    }
  }
}

TEST(Sigma, SmallArgumentLimit)
{
  const auto & o = pumped().pump();
  const double w = pumped().mech[0].omega;
  const cplx a = sigma(1e-5, o.kappa(), o.detuning, w) / 1e-5;
  const cplx b = sigma(2e-5, o.kappa(), o.detuning, w) / 2e-5;
  EXPECT_LT(rel(a, b), 1e-4);
  EXPECT_LT(rel(sigma_over_xi(0.0, o.kappa(), o.detuning, w), a), 1e-4);
}

TEST(Sigma, TruncationGuard)
{
  const auto & o = pumped().pump();
  const double w = pumped().mech[0].omega;
  try {
    sigma(1.05, o.kappa(), o.detuning, w, 5);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError & e) {
    EXPECT_EQ(e.required(), 14);
  }
}

TEST(AuxiliaryF, RegularAtZeroAmplitude)
{
  const auto & p = pumped();
  const auto & o = p.pump();
  const double e = o.drive_rate();
  const double w = p.mech[0].omega;
  const double gb = std::hypot(p.g(0, 0), p.g(0, 1));
  const double h = 1e-3 * w / (2.0 * gb);  // xi = 1e-3
  const cplx f0 = auxiliary_F(e, 0.0, w, o.w(), gb);
  const cplx fh = auxiliary_F(e, h, w, o.w(), gb);
  const cplx fh2 = auxiliary_F(e, 0.5 * h, w, o.w(), gb);
  EXPECT_LT(rel((4.0 * fh2 - fh) / 3.0, f0), 1e-6);
}

TEST(AuxiliaryF, TruncationConvergence)
{
  const auto & p = pumped();
  const double w = p.mech[0].omega;
  for (const double xi : {0.5, 1.05, 1.66, 3.0}) {
    const int M = default_truncation(xi);
    for (const auto & o : p.opt) {
      const cplx a = sigma(xi, o.kappa(), o.detuning, w, M);
      const cplx b = sigma(xi, o.kappa(), o.detuning, w, M + 10);
      EXPECT_LT(rel(a, b), 1e-10) << "xi=" << xi;
    }
  }
}

TEST(AuxiliaryF, EvenPowersOnly)
{
  const auto & p = pumped();
  const auto & o = p.pump();
  const double w = p.mech[0].omega;
  const double gb = std::hypot(p.g(0, 0), p.g(0, 1));
  const int n = 81;
  const int deg = 9;
  Eigen::MatrixXd V(n, deg + 1);
  Eigen::VectorXd re(n);
  Eigen::VectorXd im(n);
  for (int k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / (n - 1);  // xi = 0.2 u
    const double xi = 0.2 * u;
    for (int d = 0; d <= deg; ++d) {
      V(k, d) = std::pow(u, d);
    }
    const cplx f = auxiliary_F(o.drive_rate(), xi * w / (2.0 * gb), w, o.w(), gb);
    re(k) = f.real();
    im(k) = f.imag();
  }
  const auto qr = V.colPivHouseholderQr();
  const Eigen::VectorXd cr = qr.solve(re);
  const Eigen::VectorXd ci = qr.solve(im);
  double even = 0.0;
  for (int d = 0; d <= deg; d += 2) {
    even = std::max({even, std::abs(cr(d)), std::abs(ci(d))});
  }
  for (int d = 1; d <= deg; d += 2) {
    EXPECT_LT(std::abs(cr(d)), 1e-8 * even) << "power " << d;
    EXPECT_LT(std::abs(ci(d)), 1e-8 * even) << "power " << d;
  }
}

TEST(BrightAmplitude, Cases)
{
  EXPECT_NEAR(bright_amplitude({3.0, 4.0}, {0.0, 0.0}, 0.4, 0.7).magnitude, 5.0 * 0.4 / std::hypot(0.4, 0.7), 1e-12);
  EXPECT_NEAR(bright_amplitude({2.0, 0.0}, {2.0, 0.0}, 0.5, 0.5).magnitude, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_THROW(bright_amplitude({1.0, 0.0}, {1.0, 0.0}, 0.0, 0.0), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const cplx a1(u(rng), u(rng));
    const cplx a2(u(rng), u(rng));
    EXPECT_LE(bright_amplitude(a1, a2, g(rng), g(rng)).magnitude, std::abs(a1) + std::abs(a2) + 1e-12);
  }
}

TEST(NonlinearCoeffs, UncoupledCross)
{
  auto p = pumped();
  p.mech[1].g[kPump] = 0.0;   // g_12
  p.mech[0].g[kProbe] = 0.0;  // g_21
  const auto c = nonlinear_coeffs({300.0, 0.0}, {50.0, 20.0}, p);
  EXPECT_EQ(c.d12, cplx(0.0, 0.0));
  EXPECT_NE(c.d1, cplx(0.0, 0.0));
}

TEST(NonlinearCoeffs, RankOneCouplings)
{
  // Table 1 couples both cavity modes with the same g_j, so d_12^2 = d_1 d_2.
  const auto c = nonlinear_coeffs({3e4, 0.0}, {2e3, 1e3}, pumped());
  EXPECT_LT(rel(c.d12 * c.d12, c.d1 * c.d2), 1e-12);
}

TEST(NonlinearCoeffs, DampingCancelsAtRoot)
{
  const auto & p = pumped();
  const auto lc = limit_cycle_solve(p);
  ASSERT_TRUE(lc.found);
  const auto c = nonlinear_coeffs({lc.amplitude, 0.0}, {0.0, 0.0}, p);
  EXPECT_NEAR(c.d1.imag() / p.mech[0].gamma, -1.0, 1e-6);
}

TEST(NonlinearCoeffs, SecondModeClosedForm)
{
  const auto & p = pumped();
  const auto lc = limit_cycle_solve(p);
  ASSERT_TRUE(lc.found);
  const auto s = second_mode_steady(p, lc);
  const double g1 = p.mech[0].g[kProbe];
  const double g2 = p.mech[1].g[kProbe];
  const double closed = 1.0 - p.mech[0].gamma * g2 * g2 / (p.mech[1].gamma * g1 * g1);
  EXPECT_NEAR(s.gamma_eff / p.mech[1].gamma / closed, 1.0, 0.02);
  EXPECT_NEAR(s.enhancement, 1.38, 0.02);
}

TEST(GammaEff, ResonantProbeNoPump)
{
  auto p = with_pump_power(testutil::table1(), 0.0);
  p.opt[kProbe].detuning = 0.0;
  p.opt[kProbe].bare_detuning = 0.0;
  for (const double xi : {0.0, 0.5, 1.2}) {
    EXPECT_NEAR(gamma1_eff(xi, p) / p.mech[0].gamma, 1.0, 1e-6);
  }
}

TEST(GammaEff, AntidampedAtSmallAmplitude)
{
  EXPECT_LT(gamma1_eff(0.01, pumped()), 0.0);
  EXPECT_LT(gamma1_eff(0.0, pumped()), 0.0);
}

TEST(GammaEff, GridRefinementContinuity)
{
  LimitCycleOptions coarse;
  LimitCycleOptions fine;
  fine.xi_step = 0.001;
  const auto a = limit_cycle_solve(pumped(), coarse);
  const auto b = limit_cycle_solve(pumped(), fine);
  ASSERT_EQ(a.roots.size(), b.roots.size());
  EXPECT_NEAR(a.xi, b.xi, 1e-7);
}

TEST(LimitCycle, BelowThreshold)
{
  EXPECT_TRUE(limit_cycle_solve(with_pump_power(testutil::table1(), 1e-6)).roots.empty());
}

TEST(LimitCycle, MultipleRootsAtHighPower)
{
  LimitCycleOptions o;
  o.xi_max = 12.0;
  EXPECT_GE(limit_cycle_solve(with_pump_power(testutil::table1(), 700e-6), o).roots.size(), 2u);
}

TEST(Threshold, LinearInDamping)
{
  // The root condition is linear in gamma_1, so the threshold is affine in it.
  auto p = testutil::table1();
  const double g0 = p.mech[0].gamma;
  std::array<double, 3> th{};
  for (int k = 0; k < 3; ++k) {
    p.mech[0].gamma = g0 * (k + 1);
    th[static_cast<std::size_t>(k)] = threshold_power(p, 0);
  }
  EXPECT_NEAR((th[2] - th[1]) / (th[1] - th[0]), 1.0, 1e-4);
  // Probe back-action shifts the intercept, so doubling is only approximate.
  EXPECT_NEAR(th[1] / th[0], 2.0, 0.25);
}

TEST(Multistability, BoundaryDefinition)
{
  const auto & p = testutil::table1();
  const auto r = multistability_boundary(p, 50e-6, 400e-6, 10e-6);
  ASSERT_TRUE(r.found);
  LimitCycleOptions o;
  o.xi_max = 12.0;
  EXPECT_EQ(limit_cycle_solve(with_pump_power(p, r.power - 10e-6 / 32.0), o).roots.size(), 1u);
  EXPECT_GE(limit_cycle_solve(with_pump_power(p, r.power), o).roots.size(), 2u);

  LimitCycleOptions loose;
  loose.rel_tol = 1e-6;
  LimitCycleOptions tight;
  tight.rel_tol = 1e-9;
  const auto a = multistability_boundary(p, 50e-6, 400e-6, 10e-6, loose);
  const auto b = multistability_boundary(p, 50e-6, 400e-6, 10e-6, tight);
  EXPECT_NEAR(a.power, b.power, 10e-6);
}

TEST(SecondMode, NoCrossCouplingNoSync)
{
  auto p = pumped();
  p.mech[1].g[kPump] = 0.0;
  p.mech[1].g[kProbe] = 0.0;
  const auto lc = limit_cycle_solve(p);
  ASSERT_TRUE(lc.found);
  const auto s = second_mode_steady(p, lc);
  EXPECT_EQ(s.sync_amplitude, 0.0);
  EXPECT_NEAR(s.enhancement, 1.0, 1e-12);
  EXPECT_FALSE(s.full_sync);
}

TEST(SecondMode, Table1NotFullySynchronised)
{
  const auto lc = limit_cycle_solve(pumped());
  const auto s = second_mode_steady(pumped(), lc);
  EXPECT_TRUE(s.stable);
  EXPECT_FALSE(s.full_sync);
}

TEST(SyncMeasure, Cases)
{
  const std::size_t n = 1000;
  std::vector<double> a(n);
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = 0.01 * static_cast<double>(k);
    b[k] = a[k] + M_PI;
  }
  for (const double v : sync_measure(a, a, 100)) {
    EXPECT_NEAR(v, 1.0, 1e-12);
  }
  for (const double v : sync_measure(a, b, 100)) {
    EXPECT_NEAR(v, -1.0, 1e-12);
  }
  EXPECT_THROW(sync_measure(a, b, 1001), std::invalid_argument);
  EXPECT_THROW(sync_measure(a, b, 5), std::invalid_argument);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  const std::size_t N = 400;
  std::vector<double> r1(20 * N);
  std::vector<double> r2(20 * N);
  for (std::size_t k = 0; k < r1.size(); ++k) {
    r1[k] = u(rng);
    r2[k] = u(rng);
  }
  const auto s = sync_measure(r1, r2, N);
  for (std::size_t k = 0; k < s.size(); k += N) {
    EXPECT_LT(std::abs(s[k]), 3.0 / std::sqrt(static_cast<double>(N)));
  }
}

TEST(AmplitudeEquations, ThermalEquilibriumWithoutCoupling)
{
  auto p = testutil::table1();
  for (auto & m : p.mech) {
    m.g[0] = m.g[1] = 0.0;
  }
  SlowflowOptions o;
  o.dt = 1e-3;
  o.duration = 2000.0;
  o.decimation = 1;
  o.seed = 8;
  double acc[2] = {0.0, 0.0};
  std::size_t n = 0;
  integrate_amplitude_eqs(p, {0.0, 0.0}, {0.0, 0.0}, DriveSchedule::constant(0.0), o, [&](const SlowSample & s) {
    if (s.t >= 5.0) {
      acc[0] += std::norm(s.A1);
      acc[1] += std::norm(s.A2);
      ++n;
    }
  });
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(acc[j] / n / (p.mech[j].n_thermal() + 0.5), 1.0, 0.03) << "mode " << j;
  }
}

TEST(AmplitudeEquations, Deterministic)
{
  SlowflowOptions o;
  o.duration = 0.2;
  o.seed = 4;
  const auto a = integrate_amplitude_eqs(pumped(), {1e3, 0.0}, {0.0, 0.0}, DriveSchedule::constant(4.25e-6), o);
  const auto b = integrate_amplitude_eqs(pumped(), {1e3, 0.0}, {0.0, 0.0}, DriveSchedule::constant(4.25e-6), o);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  EXPECT_EQ(a.samples.back().A1, b.samples.back().A1);
}

TEST(AmplitudeEquations, StepGuard)
{
  SlowflowOptions o;
  o.dt = 0.05;
  o.duration = 1.0;
  EXPECT_THROW(
    integrate_amplitude_eqs(pumped(), {1e3, 0.0}, {0.0, 0.0}, DriveSchedule::constant(4.25e-6), o),
    std::invalid_argument);
}
