// memdyn command-line front end.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure, 3 I/O failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "memdyn/memdyn.hpp"

using namespace memdyn;

namespace
{

struct Common
{
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> dt;
  std::string xi;
  std::string power;
  std::string schedule;
  std::string band;
  int truncation = 0;
};

double parse_number(const std::string & item, const std::string & flag, const std::string & spec)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(item, &used);
  } catch (const std::logic_error &) {
    used = 0;
  }
  if (item.empty() || used != item.size()) {
    throw ConfigError(flag, "cannot parse '" + spec + "'");
  }
  return v;
}

std::vector<double> split_numbers(const std::string & spec, const std::string & flag)
{
  std::vector<double> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) {
    parts.push_back(parse_number(item, flag, spec));
  }
  return parts;
}

/// "a:b:c" (start:step:stop, inclusive) or a single value.
std::vector<double> parse_range(const std::string & spec, const std::string & flag)
{
  const auto parts = split_numbers(spec, flag);
  if (parts.size() == 1) {
    return parts;
  }
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
    throw ConfigError(flag, "bad range '" + spec + "', expected start:step:stop with step > 0");
  }
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    out.push_back(parts[0] + static_cast<double>(k) * parts[1]);
  }
  return out;
}

std::pair<double, double> parse_band(const std::string & spec)
{
  const auto parts = split_numbers(spec, "--band");
  if (parts.size() != 2 || !(parts[1] > parts[0])) {
    throw ConfigError("--band", "expected LO:HI in Hz with HI > LO, got '" + spec + "'");
  }
  return {parts[0], parts[1]};
}

std::uint64_t resolve_seed(const Common & c)
{
  if (c.seed) {
    return *c.seed;
  }
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << " (drawn from entropy)\n";
  return s;
}

std::string out_path(const Common & c, const std::string & name)
{
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

SystemParams load(const Common & c) { return load_config_file(c.config); }

DriveSchedule schedule_or_config(const Common & c, const SystemParams & p)
{
  return c.schedule.empty() ? DriveSchedule::constant(p.pump().power) : parse_schedule(c.schedule);
}

double run_duration(const Common & c, const DriveSchedule & s, double fallback)
{
  if (c.duration) {
    return *c.duration;
  }
  return s.end > 0.0 ? s.end : fallback;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common & c, std::size_t decimation, std::size_t state_decimation)
{
  const auto p = load(c);
  const auto sched = schedule_or_config(c, p);
  LangevinOptions o;
  o.dt = c.dt.value_or(o.dt);
  o.duration = run_duration(c, sched, 1.0);
  o.decimation = decimation;
  o.seed = resolve_seed(c);
  const auto hc = HomodyneConfig::from(p);
  // Auto lock is set on the static cavity before the pump acts.
  const double phi = hc.lo_phase.value_or(lo_phase_lock(reflection_set(0.0, 0.0, p).dc()));
  const cplx rot = std::polar(1.0, -phi);
  const double gain = hc.gain();

  ColumnarHeader vh_header{params_hash(p), o.dt * static_cast<double>(decimation), decimation, o.seed, phi, {"t", "vh"}, 0};
  ColumnarWriter vh(out_path(c, "vh.bin"), vh_header);
  ColumnarHeader st_header{params_hash(p),
                           o.dt * static_cast<double>(decimation * state_decimation),
                           decimation * state_decimation,
                           o.seed,
                           0.0,
                           {"t", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "beta1_re", "beta1_im", "beta2_re",
                            "beta2_im"},
                           0};
  ColumnarWriter st(out_path(c, "trajectory.bin"), st_header);
  std::size_t k = 0;
  simulate_langevin(p, sched, o, [&](const LangevinSample & s) {
    const double row_v[2] = {s.t, gain * (reflection(s, p) * rot).real()};
    vh.row(row_v);
    if (k++ % state_decimation == 0) {
      const double row_s[9] = {s.t,
                               s.alpha[0].real(), s.alpha[0].imag(), s.alpha[1].real(), s.alpha[1].imag(),
                               s.beta[0].real(), s.beta[0].imag(), s.beta[1].real(), s.beta[1].imag()};
      st.row(row_s);
    }
  });
  vh.close();
  st.close();
  std::cout << "wrote " << out_path(c, "vh.bin") << " and " << out_path(c, "trajectory.bin") << " (seed " << o.seed
            << ", lo phase " << phi << ")\n";
  return 0;
}

int cmd_slowflow(const Common & c, double window)
{
  const auto p = load(c);
  const auto sched = schedule_or_config(c, p);
  SlowflowOptions o;
  o.dt = c.dt.value_or(o.dt);
  o.duration = run_duration(c, sched, 10.0);
  o.seed = resolve_seed(c);
  o.truncation = c.truncation;
  const double a0 = std::sqrt(p.mech[0].n_thermal());
  const auto traj = integrate_amplitude_eqs(p, {a0, 0.0}, {0.0, 0.0}, sched, o);

  ColumnarHeader h{params_hash(p), traj.dt, o.decimation, o.seed, traj.omega_ref,
                   {"t", "A1_re", "A1_im", "A2_re", "A2_im"}, 0};
  ColumnarWriter w(out_path(c, "slowflow.bin"), h);
  std::vector<double> th1;
  std::vector<double> th2;
  for (const auto & s : traj.samples) {
    w.row({s.t, s.A1.real(), s.A1.imag(), s.A2.real(), s.A2.imag()});
    th1.push_back(std::arg(s.A1));
    th2.push_back(std::arg(s.A2));
  }
  w.close();

  const auto n = static_cast<std::size_t>(std::llround(window / traj.dt));
  const auto pm = sync_measure(th1, th2, n);
  CsvWriter csv(out_path(c, "sync.csv"), {"t", "p_theta"});
  for (std::size_t k = 0; k < pm.size(); ++k) {
    csv.row({traj.samples[k + n / 2].t, pm[k]});
  }
  std::cout << "wrote " << out_path(c, "slowflow.bin") << " and " << out_path(c, "sync.csv") << " (seed " << o.seed << ")\n";
  return 0;
}

int cmd_limit_cycle(const Common & c, double xi_max)
{
  const auto p = load(c);
  LimitCycleOptions lo;
  lo.truncation = c.truncation;
  lo.xi_max = xi_max;

  const auto lc = limit_cycle_solve(p, lo);
  {
    CsvWriter csv(out_path(c, "roots.csv"), {"xi", "stable", "q_m", "frequency_shift_hz"});
    for (const auto & r : lc.roots) {
      const double a = amplitude_from_xi(p, 0, r.xi);
      const auto d = nonlinear_coeffs({a, 0.0}, {0.0, 0.0}, p, c.truncation);
      csv.row({r.xi, r.stable ? 1.0 : 0.0, 2.0 * a * p.mech[0].x_zpf(), rad_to_hz(-d.d1.real())});
    }
  }
  {
    CsvWriter csv(out_path(c, "gamma_eff.csv"), {"xi", "gamma1_eff_over_gamma1", "gamma2_eff_over_gamma2"});
    for (double xi = 0.0; xi <= xi_max + 1e-12; xi += 0.005) {
      csv.row({xi, gamma_eff(p, 0, xi, c.truncation) / p.mech[0].gamma,
               gamma_eff(p, 1, xi, c.truncation) / p.mech[1].gamma});
    }
  }
  if (lc.found) {
    std::cout << "xi_st = " << fmt(lc.xi) << "\nq_st_m = " << fmt(lc.displacement)
              << "\nfrequency_shift_hz = " << fmt(rad_to_hz(lc.frequency_shift)) << "\n";
    const auto s = second_mode_steady(p, lc, c.truncation);
    std::cout << "gamma2_eff_over_gamma2 = " << fmt(s.gamma_eff / p.mech[1].gamma)
              << "\nenhancement = " << fmt(s.enhancement) << "\nsync_to_thermal = " << fmt(s.sync_to_thermal)
              << "\nliteral_sync_ratio = " << fmt(s.literal_sync_ratio)
              << "\nfull_sync = " << (s.full_sync ? "yes" : "no") << "\n";
  } else {
    std::cout << "no limit cycle (" << lc.roots.size() << " unstable roots)\n";
  }

  if (!c.power.empty()) {
    const auto powers = parse_range(c.power, "--power");
    CsvWriter csv(out_path(c, "power_scan.csv"), {"power_w", "n_roots", "xi_roots", "stable_flags"});
    LimitCycleOptions wide = lo;
    wide.xi_max = std::max(xi_max, 12.0);
    for (const double pw : powers) {
      const auto s = limit_cycle_solve(with_pump_power(p, pw), wide);
      std::string xs;
      std::string fl;
      for (const auto & r : s.roots) {
        xs += (xs.empty() ? "" : " ") + fmt(r.xi);
        fl += (fl.empty() ? "" : " ") + std::string(r.stable ? "1" : "0");
      }
      csv.row_text({fmt(pw), std::to_string(s.roots.size()), xs, fl});
    }
    std::cout << "threshold_mode1_w = " << fmt(threshold_power(p, 0, lo)) << "\n";
    std::cout << "threshold_mode2_w = " << fmt(threshold_power(p, 1, lo)) << "\n";
    const auto ms = multistability_boundary(p, powers.front(), powers.back(), powers.size() > 1 ? powers[1] - powers[0] : powers.front(), lo);
    std::cout << "multistability_w = " << (ms.found ? fmt(ms.power) : std::string("none in range")) << "\n";
  }
  return 0;
}

int cmd_response_sweep(const Common & c)
{
  const auto p = load(c);
  const auto xis = parse_range(c.xi.empty() ? "0:0.01:2" : c.xi, "--xi");
  CsvWriter csv(out_path(c, "response_sweep.csv"),
                {"xi", "t1", "tsb", "t2", "tsb_printed", "n1", "n2", "r_dc_re", "r_dc_im", "lo_phase", "v_omega1",
                 "v_omega2", "v_omega_sm", "v_omega_b", "v_omega_sb"});
  const double g2A2 = thermal_g2A2(p);
  for (const double xi : xis) {
    const auto rs = reflection_set(xi, g2A2, p, c.truncation);
    const auto r = ratios_from_set(rs);
    const auto n = correction_factors(xi, p, c.truncation);
    csv.row({xi, r.t1, r.tsb, r.t2, r.tsb_printed, n.n1, n.n2, rs.dc().real(), rs.dc().imag(), lo_phase_lock(rs.dc()),
             homodyne_asn(rs[ToneId::Omega1]), homodyne_asn(rs[ToneId::Omega2]), homodyne_asn(rs[ToneId::OmegaSM]),
             homodyne_asn(rs[ToneId::OmegaB]), homodyne_asn(rs[ToneId::OmegaSB])});
  }
  std::cout << "wrote " << csv.path() << " (" << xis.size() << " rows)\n";
  return 0;
}

/// Reads a V_H file written by `simulate` and cuts [t0, t1).
std::pair<std::vector<double>, double> read_vh(const std::string & path, double t0, double t1)
{
  const auto d = read_columnar(path);
  if (d.header.columns.size() != 2 || d.header.columns[1] != "vh") {
    throw std::ios_base::failure("'" + path + "' is not a V_H file");
  }
  std::vector<double> v;
  for (std::size_t k = 0; k < d.header.rows; ++k) {
    const double t = d.at(k, 0);
    if (t >= t0 && t < t1) {
      v.push_back(d.at(k, 1));
    }
  }
  if (v.empty()) {
    throw std::ios_base::failure("'" + path + "': no samples in the requested time window");
  }
  return {v, 1.0 / d.header.dt};
}

int cmd_calibrate(const Common & c, const std::string & input, double t0, double t1, ObservedTones obs)
{
  const auto p = load(c);
  if (!input.empty()) {
    const auto [v, fs] = read_vh(input, t0, t1);
    std::size_t seg = 1;
    while (seg * 2 <= v.size() && static_cast<double>(seg) < fs / 2.0) {
      seg *= 2;  // ~2 Hz resolution or the whole window
    }
    const auto psd = welch_psd(v, fs, seg);
    obs.v1 = tone_rms(psd, rad_to_hz(p.mech[0].omega));
    obs.v2 = tone_rms(psd, rad_to_hz(p.mech[1].omega));
    obs.vb = tone_rms(psd, rad_to_hz(p.modulation.omega));
    obs.vsm = tone_rms(psd, rad_to_hz(tone_frequency(ToneId::OmegaSM, p)));
  }
  const auto r = calibrate(obs, p, c.truncation);
  CsvWriter csv(out_path(c, "calibration.csv"), {"quantity", "value"});
  auto put = [&](const std::string & k, double v) {
    csv.row_text({k, fmt(v)});
    std::cout << k << " = " << fmt(v) << "\n";
  };
  std::cout << "xi_source = " << (r.xi_valid ? r.xi_source : "none") << "\n";
  put("xi", r.xi);
  put("t1", r.t1);
  put("t2", r.t2);
  put("tsb", r.tsb);
  put("n1", r.n1);
  put("n2", r.n2);
  put("q1_effective_m", r.q1_effective);
  put("q1_observed_m", r.q1_observed);
  put("q2_effective_m", r.q2_effective);
  put("q2_observed_m", r.q2_observed);
  put("enhancement", r.enhancement);
  put("q2_predicted_m", r.q2_predicted);
  for (const auto & flag : r.flags) {
    std::cout << "flag: " << flag << "\n";
  }
  return r.xi_valid ? 0 : 2;
}

int cmd_spectra(const Common & c, const std::string & input, double segment_s, double hop_s, double sub_s)
{
  const auto p = load(c);
  const auto d = read_columnar(input);
  (void)p;
  if (d.header.columns.size() != 2 || d.header.columns[1] != "vh") {
    throw std::ios_base::failure("'" + input + "' is not a V_H file");
  }
  std::vector<double> v(d.header.rows);
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = d.at(k, 1);
  }
  const double fs = 1.0 / d.header.dt;
  const auto seg = static_cast<std::size_t>(std::llround(segment_s * fs));
  const auto hop = static_cast<std::size_t>(std::llround(hop_s * fs));
  const auto sub = static_cast<std::size_t>(std::llround(sub_s * fs));
  const auto sg = spectrogram(v, fs, seg, hop, Window::Hann, sub);
  const auto [lo, hi] = c.band.empty() ? std::pair<double, double>{0.0, fs / 2.0} : parse_band(c.band);

  CsvWriter grid(out_path(c, "spectrogram.csv"), {"t", "f", "psd"});
  for (std::size_t t = 0; t < sg.time.size(); ++t) {
    for (std::size_t k = 0; k < sg.freq.size(); ++k) {
      if (sg.freq[k] >= lo && sg.freq[k] <= hi) {
        grid.row({sg.time[t], sg.freq[k], sg.power[t][k]});
      }
    }
  }
  const auto var = band_variance(sg, lo, hi);
  CsvWriter bv(out_path(c, "band_variance.csv"), {"t", "variance"});
  for (std::size_t t = 0; t < sg.time.size(); ++t) {
    bv.row({sg.time[t], var[t]});
  }
  std::cout << "wrote " << grid.path() << " and " << bv.path() << " (" << sg.time.size() << " columns)\n";
  return 0;
}

int cmd_sync(const Common & c, const std::string & input, double window)
{
  const auto d = read_columnar(input);
  const auto & cols = d.header.columns;
  std::size_t i1 = 0;
  std::size_t i2 = 0;
  bool langevin = false;
  if (cols.size() == 9 && cols[5] == "beta1_re") {
    i1 = 5;
    i2 = 7;
    langevin = true;
  } else if (cols.size() == 5 && cols[1] == "A1_re") {
    i1 = 1;
    i2 = 3;
  } else {
    throw std::ios_base::failure("'" + input + "' is neither a trajectory nor a slow-flow file");
  }
  std::array<cplx, 2> shift{};
  if (langevin && !c.config.empty()) {
    const auto p = load(c);
    if (params_hash(p) != d.header.params_hash) {
      std::cerr << "warning: config differs from the one that produced '" << input << "'\n";
    }
    shift = p.static_shift;
  }
  std::vector<double> th1(d.header.rows);
  std::vector<double> th2(d.header.rows);
  for (std::size_t k = 0; k < d.header.rows; ++k) {
    th1[k] = std::arg(cplx(d.at(k, i1), d.at(k, i1 + 1)) - shift[0]);
    th2[k] = std::arg(cplx(d.at(k, i2), d.at(k, i2 + 1)) - shift[1]);
  }
  const auto n = static_cast<std::size_t>(std::llround(window / d.header.dt));
  const auto pm = sync_measure(th1, th2, n);
  CsvWriter csv(out_path(c, "sync.csv"), {"t", "p_theta"});
  for (std::size_t k = 0; k < pm.size(); ++k) {
    csv.row({d.at(k + n / 2, 0), pm[k]});
  }
  std::cout << "wrote " << csv.path() << " (" << pm.size() << " rows)\n";
  return 0;
}

int cmd_derived(const Common & c)
{
  const auto p = load(c);
  const auto d = derived_params(p);
  const auto s = shot_noise_sensitivity(p, HomodyneConfig::from(p));
  std::vector<std::pair<std::string, double>> rows{
    {"kappa1_hz", rad_to_hz(d.kappa[0])},
    {"kappa2_hz", rad_to_hz(d.kappa[1])},
    {"drive_rate1_per_s", d.drive_rate[0]},
    {"drive_rate2_per_s", d.drive_rate[1]},
    {"mass1_kg", p.mech[0].mass},
    {"mass2_kg", p.mech[1].mass},
    {"x_zpf1_m", d.x_zpf[0]},
    {"x_zpf2_m", d.x_zpf[1]},
    {"n_thermal1", d.n_thermal[0]},
    {"n_thermal2", d.n_thermal[1]},
    {"q_thermal1_m", d.q_thermal[0]},
    {"q_thermal2_m", d.q_thermal[1]},
    {"delta1_bare_hz", rad_to_hz(d.bare_detuning[0])},
    {"delta2_bare_hz", rad_to_hz(d.bare_detuning[1])},
    {"delta1_hz", rad_to_hz(p.opt[0].detuning)},
    {"delta2_hz", rad_to_hz(p.opt[1].detuning)},
    {"finesse", d.finesse},
    {"response_length_m", d.response_length},
    {"xi_cav", d.xi_cav},
    {"shot_noise_m_per_rthz", s.delta_x},
    {"eta", s.eta},
    {"langevin_max_dt_s", langevin_max_dt(p)},
  };
  std::unique_ptr<CsvWriter> csv;
  if (c.out != ".") {
    csv = std::make_unique<CsvWriter>(out_path(c, "derived.csv"), std::vector<std::string>{"quantity", "value"});
  }
  for (const auto & [k, v] : rows) {
    std::cout << k << " = " << fmt(v) << "\n";
    if (csv) {
      csv->row_text({k, fmt(v)});
    }
  }
  for (const auto & w : p.warnings) {
    std::cout << "warning: " << w << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"memdyn: two-membrane optomechanics simulator"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App * sub) {
    sub->add_option("--config", c.config, "parameter file")->required();
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--truncation", c.truncation, "Bessel series truncation M (0 = default)");
  };

  std::size_t decimation = 50;
  std::size_t state_decimation = 20;
  auto * simulate = app.add_subcommand("simulate", "full Langevin run; writes trajectory.bin and vh.bin");
  add_common(simulate);
  simulate->add_option("--seed", c.seed, "noise seed (default: random, logged)");
  simulate->add_option("--duration", c.duration, "seconds (default: schedule length)");
  simulate->add_option("--dt", c.dt, "integration step, s");
  simulate->add_option("--schedule", c.schedule, "pump schedule, e.g. off:10,4.25uW:15,6.0uW:25");
  simulate->add_option("--decimation", decimation, "integration steps per V_H sample");
  simulate->add_option("--state-decimation", state_decimation, "V_H samples per stored state sample");

  double sync_window = 0.1;
  auto * slowflow = app.add_subcommand("slowflow", "amplitude equations; writes slowflow.bin and sync.csv");
  add_common(slowflow);
  slowflow->add_option("--seed", c.seed, "noise seed (default: random, logged)");
  slowflow->add_option("--duration", c.duration, "seconds (default: schedule length)");
  slowflow->add_option("--dt", c.dt, "integration step, s");
  slowflow->add_option("--schedule", c.schedule, "pump schedule, e.g. off:10,4.25uW:15");
  slowflow->add_option("--window", sync_window, "synchronization window, s");

  double xi_max = 5.0;
  auto * lc = app.add_subcommand("limit-cycle", "limit-cycle roots, gamma_eff curve, optional power scan");
  add_common(lc);
  lc->add_option("--power", c.power, "pump power scan start:step:stop in W");
  lc->add_option("--xi-max", xi_max, "upper end of the root search");

  auto * sweep = app.add_subcommand("response-sweep", "tone ratios and correction factors versus xi");
  add_common(sweep);
  sweep->add_option("--xi", c.xi, "start:step:stop");

  std::string input;
  double t0 = 0.0;
  double t1 = 1e300;
  ObservedTones obs;
  double v1 = -1.0;
  double v2 = -1.0;
  double vb = -1.0;
  double vsm = -1.0;
  double pre_q2 = -1.0;
  auto * cal = app.add_subcommand("calibrate", "calibration from a V_H file or from tone amplitudes");
  add_common(cal);
  cal->add_option("--input", input, "vh.bin written by simulate");
  cal->add_option("--from", t0, "start of analysis window, s");
  cal->add_option("--to", t1, "end of analysis window, s");
  cal->add_option("--v1", v1, "tone amplitude at omega_1");
  cal->add_option("--v2", v2, "tone amplitude at omega_2");
  cal->add_option("--vb", vb, "calibration tone amplitude");
  cal->add_option("--vsm", vsm, "tone amplitude at 2 omega_1 - omega_2");
  cal->add_option("--pre-pump-q2", pre_q2, "mode-2 displacement before pump-on, m");

  double segment = 1.0;
  double hop = 0.5;
  double sub = 0.0;
  auto * spectra = app.add_subcommand("spectra", "spectrogram and band variance of a V_H file");
  add_common(spectra);
  spectra->add_option("--input", input, "vh.bin written by simulate")->required();
  spectra->add_option("--band", c.band, "LO:HI in Hz");
  spectra->add_option("--segment", segment, "column length, s");
  spectra->add_option("--hop", hop, "column spacing, s");
  spectra->add_option("--sub-segment", sub, "Welch sub-segment inside a column, s (0 = none)");

  auto * sync = app.add_subcommand("sync", "synchronization measure from a trajectory or slow-flow file");
  sync->add_option("--config", c.config, "parameter file (removes static shifts)");
  sync->add_option("--out", c.out, "output directory");
  sync->add_option("--input", input, "trajectory.bin or slowflow.bin")->required();
  sync->add_option("--window", sync_window, "window, s");

  auto * derived = app.add_subcommand("derived", "derived parameter report");
  add_common(derived);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(c, decimation, state_decimation);
    }
    if (slowflow->parsed()) {
      return cmd_slowflow(c, sync_window);
    }
    if (lc->parsed()) {
      return cmd_limit_cycle(c, xi_max);
    }
    if (sweep->parsed()) {
      return cmd_response_sweep(c);
    }
    if (cal->parsed()) {
      if (v1 >= 0) obs.v1 = v1;
      if (v2 >= 0) obs.v2 = v2;
      if (vb >= 0) obs.vb = vb;
      if (vsm >= 0) obs.vsm = vsm;
      if (pre_q2 >= 0) obs.pre_pump_q2 = pre_q2;
      return cmd_calibrate(c, input, t0, t1, obs);
    }
    if (spectra->parsed()) {
      return cmd_spectra(c, input, segment, hop, sub);
    }
    if (sync->parsed()) {
      return cmd_sync(c, input, sync_window);
    }
    if (derived->parsed()) {
      return cmd_derived(c);
    }
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::ios_base::failure & e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError & e) {
    std::cerr << "numerical error: " << e.what();
    if (e.time() >= 0.0) {
      std::cerr << " at t = " << e.time() << " s";
    }
    std::cerr << "\n";
    return 2;
  } catch (const TruncationError & e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument & e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
