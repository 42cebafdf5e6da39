#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"

using namespace memdyn;

namespace
{

/// Table 1 with all optomechanical couplings removed.
SystemParams uncoupled()
{
  auto p = testutil::table1();
  for (auto & m : p.mech) {
    m.g[0] = m.g[1] = 0.0;
  }
  for (auto & o : p.opt) {
    o.detuning_is_effective = true;
  }
  resolve_static_shifts(p);
  return p;
}

}  // namespace

TEST(Schedule, Parse)
{
  const auto s = parse_schedule("off:10,4.25uW:15,6.0uW:25");
  ASSERT_EQ(s.segments.size(), 3u);
  EXPECT_EQ(s.power_at(5.0), 0.0);
  EXPECT_NEAR(s.power_at(12.0), 4.25e-6, 1e-18);
  EXPECT_NEAR(s.power_at(40.0), 6.0e-6, 1e-18);
  EXPECT_NEAR(s.end, 50.0, 1e-12);
  EXPECT_THROW(parse_schedule("4W"), std::invalid_argument);
  EXPECT_THROW(parse_schedule("3furlongs:2"), std::invalid_argument);
  EXPECT_THROW(parse_schedule("1mW:-2"), std::invalid_argument);
}

TEST(ProbeInput, Properties)
{
  const ProbeModulation off{0.0, hz_to_rad(225350.0)};
  EXPECT_EQ(probe_input(0.37, 2.5, off), cplx(2.5, 0.0));
  const ProbeModulation on{0.02, hz_to_rad(225350.0)};
  for (const double t : {0.0, 1e-7, 3.3e-6, 0.25}) {
    EXPECT_NEAR(std::abs(probe_input(t, 2.5, on)), 2.5, 1e-14);
  }
  EXPECT_NEAR(std::arg(probe_input(0.25 / 225350.0, 1.0, on)), -0.02, 1e-12);
}

TEST(OutputField, EmptyCavityReflectsInput)
{
  auto p = testutil::table1();
  p.modulation.depth = 0.0;
  LangevinSample s;
  EXPECT_NEAR(std::abs(output_field(s, p) + p.probe().input_amplitude()), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(reflection(s, p) + 1.0), 0.0, 1e-14);
}

TEST(Langevin, ResolutionGuard)
{
  const auto & p = testutil::table1();
  LangevinOptions o;
  o.dt = 1.1 * langevin_max_dt(p);
  o.duration = 1e-5;
  EXPECT_THROW(simulate_langevin(p, DriveSchedule::constant(0.0), o), std::invalid_argument);
  EXPECT_LT(langevin_max_dt(p), 160e-9);
  EXPECT_GT(langevin_max_dt(p), 150e-9);
}

TEST(Langevin, ResonantSteadyReflectionAndRelaxation)
{
  auto p = uncoupled();
  p.opt[kProbe].detuning = p.opt[kProbe].bare_detuning = 0.0;
  p.modulation.depth = 0.0;
  LangevinOptions o;
  o.dt = 20e-9;
  o.duration = 200e-6;
  o.decimation = 1;
  const auto traj = simulate_langevin(p, DriveSchedule::constant(0.0), o);

  const double kin = p.probe().kappa_in;
  const double k = p.probe().kappa();
  EXPECT_NEAR(reflection(traj.samples.back(), p).real(), -1.0 + 2.0 * kin / k, 1e-9);
  EXPECT_NEAR(-1.0 + 2.0 * kin / k, -0.751, 1e-3);

  // |alpha - alpha_ss| decays at the total loss rate.
  const cplx ss = traj.samples.back().alpha[kProbe];
  const auto dev = [&](std::size_t n) { return std::abs(traj.samples[n].alpha[kProbe] - ss); };
  const std::size_t n1 = 50;
  const std::size_t n2 = 250;
  const double rate = std::log(dev(n1) / dev(n2)) / (traj.samples[n2].t - traj.samples[n1].t);
  EXPECT_NEAR(rate / k, 1.0, 0.02);
}

TEST(Langevin, Deterministic)
{
  const auto & p = testutil::table1();
  LangevinOptions o;
  o.dt = 50e-9;
  o.duration = 2e-3;
  o.seed = 99;
  const auto a = simulate_langevin(p, DriveSchedule::constant(4.25e-6), o);
  const auto b = simulate_langevin(p, DriveSchedule::constant(4.25e-6), o);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t n = 0; n < a.samples.size(); ++n) {
    ASSERT_EQ(a.samples[n].beta, b.samples[n].beta);
    ASSERT_EQ(a.samples[n].alpha, b.samples[n].alpha);
  }
  o.seed = 100;
  const auto c = simulate_langevin(p, DriveSchedule::constant(4.25e-6), o);
  EXPECT_NE(a.samples.back().beta, c.samples.back().beta);
}

TEST(Langevin, Equipartition)
{
  // Heavily damped copy so that the run spans thousands of correlation times.
  auto p = uncoupled();
  for (auto & m : p.mech) {
    m.gamma = hz_to_rad(5000.0);
  }
  LangevinOptions o;
  o.dt = 100e-9;
  o.duration = 0.1;
  o.decimation = 10;
  o.seed = 5;
  double acc[2] = {0.0, 0.0};
  std::size_t n = 0;
  simulate_langevin(p, DriveSchedule::constant(0.0), o, [&](const LangevinSample & s) {
    for (std::size_t j = 0; j < 2; ++j) {
      acc[j] += std::norm(s.beta[j] - p.static_shift[j]);
    }
    ++n;
  });
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(acc[j] / n / (p.mech[j].n_thermal() + 0.5), 1.0, 0.06) << "mode " << j;
  }
}

TEST(Langevin, StepSizeConvergence)
{
  // Self-sustained state with vacuum noise only; halving dt must not move the amplitude.
  auto p = testutil::table1();
  p.mech[0].temperature = p.mech[1].temperature = 0.0;
  p.opt[kPump].power = 4.25e-6;
  resolve_static_shifts(p);
  const auto lc = limit_cycle_solve(p);
  ASSERT_TRUE(lc.found);

  const auto run = [&](double dt) {
    LangevinOptions o;
    o.dt = dt;
    o.duration = 0.5;
    o.decimation = static_cast<std::size_t>(std::llround(1e-6 / dt));
    o.thermal_initial = false;
    o.initial_offset = {cplx(lc.amplitude, 0.0), cplx(0.0, 0.0)};
    double acc = 0.0;
    std::size_t n = 0;
    simulate_langevin(p, DriveSchedule::constant(4.25e-6), o, [&](const LangevinSample & s) {
      if (s.t >= 0.4) {
        acc += std::abs(s.beta[0] - p.static_shift[0]);
        ++n;
      }
    });
    return acc / n;
  };
  const double a = run(50e-9);
  const double b = run(25e-9);
  EXPECT_NEAR(a / b, 1.0, 0.01);
  EXPECT_NEAR(b / lc.amplitude, 1.0, 0.03);
}
