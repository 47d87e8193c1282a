// triad_cli: sweeps, pulsed simulations, fits and efficiency budgets from a
// unit-suffixed config file. CSV goes to --out (or stdout); fits and budgets
// emit JSON.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "triad/triad.hpp"

#ifndef TRIAD_VERSION
#define TRIAD_VERSION "dev"
#endif

using namespace triad;
using nlohmann::ordered_json;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kNoConvergence = 2, kInstability = 3 };

struct Context {
  std::string command;
  std::string config_path;
  std::string config_text;
  std::string out_path;
  std::string grid;
  std::optional<std::uint64_t> seed;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

RunConfig load(Context& ctx) {
  if (ctx.config_path.empty()) throw ConfigError("--config is required for " + ctx.command);
  ctx.config_text = read_file(ctx.config_path);
  return load_config(parse_config(ctx.config_text));
}

std::vector<std::pair<std::string, std::string>> metadata(const Context& ctx) {
  std::vector<std::pair<std::string, std::string>> m = {
      {"version", TRIAD_VERSION},
      {"command", ctx.command},
      {"config_hash", ctx.config_text.empty() ? "none" : "fnv1a64:" + hex64(fnv1a64(ctx.config_text))},
  };
  if (ctx.seed) m.emplace_back("seed", std::to_string(*ctx.seed));
  return m;
}

void emit(const Context& ctx, const std::function<void(std::ostream&)>& body) {
  if (ctx.out_path.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(ctx.out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + ctx.out_path);
  body(out);
}

// Evaluates fn(i) for i in [0, n) on a few threads; results land in
// caller-owned slots so the assembly order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(n / 64, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

SweepGrid parse_grid(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(detail::parse_number(item, "--grid"));
  if (v.size() != 3) throw ConfigError("--grid expects start,stop,n");
  SweepGrid g;
  g.start = hz_to_angular(v[0]);
  g.stop = hz_to_angular(v[1]);
  if (!(v[2] >= 1.0) || v[2] != std::floor(v[2])) throw ConfigError("--grid point count must be a positive integer");
  g.points = static_cast<std::size_t>(v[2]);
  return g;
}

std::vector<double> grid_points(const SweepGrid& g) {
  if (g.points == 0) throw ConfigError("empty sweep grid");
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ConfigError("sweep bounds must be finite");
  if (g.points == 1) return {g.start};
  if (!(g.stop > g.start)) throw ConfigError("sweep stop must exceed start");
  std::vector<double> v(g.points);
  for (std::size_t i = 0; i < g.points; ++i)
    v[i] = g.start + (g.stop - g.start) * static_cast<double>(i) / static_cast<double>(g.points - 1);
  return v;
}

int cmd_spectrum(Context& ctx) {
  const RunConfig cfg = load(ctx);
  std::optional<SweepGrid> grid = cfg.grid;
  if (!ctx.grid.empty()) grid = parse_grid(ctx.grid);
  if (!grid) throw ConfigError("spectrum needs a frequency grid (sweep.* keys or --grid)");
  const auto omega = grid_points(*grid);

  const auto& modes = cfg.device.acoustic_modes;
  std::vector<OperatingPoint> ops;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    ops.push_back(detuned_operating_point(cfg.device, cfg.pump, cfg.pump_detuning, k));
    detail::require_stable(ops.back());
  }
  const Spectrum eta = multimode_spectrum(cfg.device, cfg.pump, cfg.pump_detuning, omega);
  const auto onchip = eta.real("eta_onchip");
  const double port_loss = cfg.device.losses.eta_probes * cfg.device.losses.eta_fiber_chip;

  CsvTable t;
  t.metadata = metadata(ctx);
  t.metadata.emplace_back("configuration", to_string(cfg.pump.configuration));
  t.metadata.emplace_back("sparams", "nearest acoustic mode");
  for (const auto& n : eta.notes) t.metadata.emplace_back("note", n);
  t.header = {"freq_hz", "eta_onchip", "eta_offchip", "s_ac_re", "s_ac_im", "s_cc_re", "s_cc_im"};
  t.rows.resize(omega.size());
  parallel_for(omega.size(), [&](std::size_t i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < ops.size(); ++k)
      if (std::abs(omega[i] - modes[k].omega_m) < std::abs(omega[i] - modes[best].omega_m)) best = k;
    const double w = omega[i] - modes[best].omega_m;
    const cplx s_ac = transfer(ops[best], Port::Microwave, Port::Optical, w);
    const cplx s_cc = transfer(ops[best], Port::Microwave, Port::Microwave, w);
    t.rows[i] = {angular_to_hz(omega[i]), onchip[i], port_loss * onchip[i],
                 s_ac.real(), s_ac.imag(), s_cc.real(), s_cc.imag()};
  });
  emit(ctx, [&](std::ostream& os) { write_csv(os, t); });
  return kOk;
}

int cmd_power_sweep(Context& ctx) {
  const RunConfig cfg = load(ctx);
  std::vector<double> p_dbm = cfg.power_list_dbm;
  if (cfg.power_grid) {
    const SweepGrid& g = *cfg.power_grid;
    if (g.points == 1) {
      p_dbm.push_back(g.start);
    } else {
      if (!(g.stop > g.start)) throw ConfigError("sweep.power_stop_dbm must exceed power_start_dbm");
      for (std::size_t i = 0; i < g.points; ++i)
        p_dbm.push_back(g.start + (g.stop - g.start) * static_cast<double>(i) / static_cast<double>(g.points - 1));
    }
  }
  if (p_dbm.empty()) p_dbm.push_back(watts_to_dbm(cfg.pump.power_in));
  for (double p : p_dbm)
    if (std::isnan(p) || p == std::numeric_limits<double>::infinity())
      throw ConfigError("pump powers must be finite or -inf");

  CsvTable t;
  t.metadata = metadata(ctx);
  t.metadata.emplace_back("configuration", to_string(cfg.pump.configuration));
  t.header = {"power_dbm", "eta_tot", "eta_oc", "eta_int", "C", "n_bar"};
  t.rows.resize(p_dbm.size());
  parallel_for(p_dbm.size(), [&](std::size_t i) {
    PumpConfig pump = cfg.pump;
    pump.power_in = std::isinf(p_dbm[i]) ? 0.0 : dbm_to_watts(p_dbm[i]);
    const EfficiencyBudget b = offchip_efficiency(cfg.device, pump);
    t.rows[i] = {p_dbm[i], b.eta_tot, b.eta_oc, b.eta_int, b.C, b.n_bar};
  });
  emit(ctx, [&](std::ostream& os) { write_csv(os, t); });
  return kOk;
}

int cmd_pulse(Context& ctx) {
  const RunConfig cfg = load(ctx);
  const auto& ps = cfg.pulse;
  PulseSequence seq = ps.sequence;
  const double t_end = ps.t_end > 0.0 ? ps.t_end : seq.delay + seq.tau_on;
  OperatingPoint op = detuned_operating_point(cfg.device, cfg.pump, cfg.pump_detuning, 0);
  if (!ps.pump_on) op.couplings.g_minus = op.couplings.g_plus = 0.0;
  const double flux = ps.signal_power / (kHbar * cfg.pump.omega_L);
  const PulsedResult r =
      pulsed_downconversion(op, seq, cplx(std::sqrt(flux), 0.0), LockInConfig{0.0, ps.tau_rc}, t_end);

  const std::size_t n = r.lockin.t.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + 3999) / 4000);
  CsvTable t;
  t.metadata = metadata(ctx);
  t.metadata.emplace_back("tau_rc_s", format_number(ps.tau_rc));
  t.metadata.emplace_back("amp_unit", "sqrt(phonons/s)");
  t.header = {"t_s", "amp", "phase"};
  for (std::size_t k = 0; k < n; k += stride)
    t.rows.push_back({r.lockin.t[k], r.lockin.amplitude[k], ps.pump_on ? r.lockin.phase[k] : 0.0});
  emit(ctx, [&](std::ostream& os) { write_csv(os, t); });
  return kOk;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json report_json(const FitReport& rep, const Context& ctx) {
  ordered_json j;
  j["kind"] = rep.kind;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["residual_norm"] = number_or_null(rep.residual_norm);
  j["flags"] = rep.flags;
  j["seed"] = ctx.seed ? ordered_json(*ctx.seed) : ordered_json(nullptr);
  j["version"] = TRIAD_VERSION;
  ordered_json params = ordered_json::object();
  for (const auto& p : rep.parameters) {
    double v = p.value, s = p.sigma;
    std::string unit = p.unit;
    if (unit == "rad/s" || unit == "rad/s/V") {
      v = angular_to_hz(v);
      s = angular_to_hz(s);
      unit = unit == "rad/s" ? "Hz" : "Hz/V";
    }
    params[p.name] = {{"value", number_or_null(v)}, {"sigma", number_or_null(s)}, {"unit", unit}};
  }
  j["parameters"] = params;
  return j;
}

FitSettings fit_settings(Context& ctx) {
  if (ctx.config_path.empty()) return {};
  ctx.config_text = read_file(ctx.config_path);
  return read_fit_settings(parse_config(ctx.config_text));
}

CsvTable read_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path);
  CsvTable t = read_csv(in);
  if (t.rows.empty()) throw ConfigError("data file " + path + " has no rows");
  return t;
}

std::vector<double> hz_column(const CsvTable& t, const std::string& name) {
  auto v = t.values(name);
  for (double& x : v) x = hz_to_angular(x);
  return v;
}

FitReport fit_doublet_file(const CsvTable& t, const FitSettings& fs) {
  const auto omega = hz_column(t, "freq_hz");
  const auto tr = t.values("transmission");
  const auto trace = t.has_column("trace") ? t.values("trace") : std::vector<double>(omega.size(), 0.0);
  const auto bias = t.has_column("bias_v") ? t.values("bias_v") : std::vector<double>{};
  std::vector<DoubletTrace> traces;
  std::vector<double> ids;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    auto it = std::find(ids.begin(), ids.end(), trace[i]);
    std::size_t k = static_cast<std::size_t>(it - ids.begin());
    if (it == ids.end()) {
      ids.push_back(trace[i]);
      traces.emplace_back();
      if (!bias.empty()) traces.back().bias = bias[i];
    }
    traces[k].omega.push_back(omega[i]);
    traces[k].transmission.push_back(tr[i]);
  }
  DoubletOptions opt;
  opt.fixed_J = fs.doublet_J;
  return fit_doublet(traces, opt);
}

FitReport fit_s11_file(const CsvTable& t) {
  const auto omega = hz_column(t, "freq_hz");
  std::vector<cplx> s(omega.size());
  S11Options opt;
  if (t.has_column("s11_re") && t.has_column("s11_im")) {
    const auto re = t.values("s11_re"), im = t.values("s11_im");
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {re[i], im[i]};
  } else if (t.has_column("s11_mag")) {
    const auto m = t.values("s11_mag");
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = m[i];
    opt.magnitude_only = true;
  } else {
    throw ConfigError("s11 data needs s11_re,s11_im or s11_mag columns");
  }
  return fit_s11(omega, s, opt);
}

FitReport fit_power_file(const CsvTable& t, const FitSettings& fs) {
  std::vector<double> p;
  if (t.has_column("power_w")) {
    p = t.values("power_w");
  } else {
    p = t.values("power_dbm");
    for (double& x : p) x = dbm_to_watts(x);
  }
  std::vector<double> eta;
  if (t.has_column("eta_tot")) {
    eta = t.values("eta_tot");
  } else {
    eta = t.values("eta_tot_db");
    for (double& x : eta) x = db_to_linear(x);
  }
  if (!fs.kappa_o || !fs.kappa_m)
    throw ConfigError("power fit needs fit.kappa_o_hz and fit.kappa_m_hz in --config");
  PowerFitFixed f;
  f.eta_probes = fs.probes.value_or(1.0);
  f.eta_fiber_fiber = fs.fiber_fiber.value_or(1.0);
  f.eta_m = fs.eta_m.value_or(1.0);
  f.eta_o = fs.eta_o.value_or(1.0);
  f.kappa_o = *fs.kappa_o;
  f.kappa_m = *fs.kappa_m;
  if (fs.omega_L) f.omega_L = *fs.omega_L;
  return fit_efficiency_power(p, eta, f);
}

FitReport fit_step_file(const CsvTable& t) {
  const std::string col = t.has_column("amp") ? "amp" : "y";
  return fit_rc_step(t.values("t_s"), t.values(col));
}

FitReport fit_photothermal_file(const CsvTable& t) {
  const auto f = t.values("freq_hz");
  const auto re = t.values("h_re"), im = t.values("h_im");
  std::vector<cplx> h(f.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = {re[i], im[i]};
  return fit_photothermal(f, h);
}

int cmd_fit(Context& ctx, const std::string& kind, const std::string& data) {
  const FitSettings fs = fit_settings(ctx);
  const CsvTable t = read_data(data);
  FitReport rep;
  if (kind == "doublet")
    rep = fit_doublet_file(t, fs);
  else if (kind == "s11")
    rep = fit_s11_file(t);
  else if (kind == "power")
    rep = fit_power_file(t, fs);
  else if (kind == "step")
    rep = fit_step_file(t);
  else if (kind == "photothermal")
    rep = fit_photothermal_file(t);
  else
    throw ConfigError("unknown fit kind " + kind);
  rep.seed = ctx.seed;
  ordered_json j = report_json(rep, ctx);
  j["data"] = data;
  emit(ctx, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return rep.converged ? kOk : kNoConvergence;
}

int cmd_budget(Context& ctx) {
  const RunConfig cfg = load(ctx);
  const EfficiencyBudget b = offchip_efficiency(cfg.device, cfg.pump);
  const AcousticMode& mode = cfg.device.transduction_mode();

  ordered_json j;
  j["version"] = TRIAD_VERSION;
  j["config_hash"] = "fnv1a64:" + hex64(fnv1a64(ctx.config_text));
  j["seed"] = ctx.seed ? ordered_json(*ctx.seed) : ordered_json(nullptr);
  j["configuration"] = to_string(b.configuration);
  ordered_json e;
  e["power_in_w"] = b.power_in;
  e["n_bar"] = b.n_bar;
  e["C"] = b.C;
  e["C0"] = b.C0;
  e["g0_hz"] = angular_to_hz(cfg.device.g0);
  e["eta_o"] = b.eta_o;
  e["eta_m"] = b.eta_m;
  e["eta_ext"] = b.eta_ext;
  e["eta_int"] = b.eta_int;
  e["eta_oc"] = b.eta_oc;
  e["eta_probes"] = b.eta_probes;
  e["eta_fiber_chip"] = b.eta_fiber_chip;
  e["eta_tot"] = b.eta_tot;
  e["eta_tot_db"] = b.eta_tot > 0.0 ? ordered_json(linear_to_db(b.eta_tot)) : ordered_json(nullptr);
  e["eta_tot_linear"] = b.eta_tot_linear;
  ordered_json ledger = ordered_json::array();
  for (const auto& [stage, f] : b.ledger) ledger.push_back({{"stage", stage}, {"factor", f}});
  e["ledger"] = ledger;
  j["efficiency"] = e;

  ordered_json deco = ordered_json::array();
  for (double T : cfg.temperatures) {
    const double n = n_thermal(mode.omega_m, T);
    deco.push_back({{"temperature_k", T}, {"n_th", n}, {"rate_hz", decoherence_rate(mode.kappa_m, n)}});
  }
  j["decoherence"] = deco;

  const double T_noise = cfg.temperatures.empty() ? 0.0 : cfg.temperatures.front();
  const OperatingPoint op = detuned_operating_point(cfg.device, cfg.pump, cfg.pump_detuning, 0);
  ordered_json noise;
  noise["temperature_k"] = T_noise;
  try {
    const NoiseReport nr = added_noise(op, 0.0, ThermalEnvironment(T_noise));
    noise["n_added_up"] = nr.n_added_up;
    noise["n_added_down"] = nr.n_added_down;
    noise["up_optical_leakage"] = nr.up_optical_leakage;
    noise["up_squeezing_floor"] = nr.up_squeezing_floor;
    noise["up_microwave_thermal"] = nr.up_microwave_thermal;
    noise["down_microwave_thermal"] = nr.down_microwave_thermal;
    noise["down_squeezing_floor"] = nr.down_squeezing_floor;
  } catch (const UnboundedNoise& ex) {
    noise["n_added_up"] = nullptr;
    noise["n_added_down"] = nullptr;
    noise["note"] = ex.what();
  }
  j["noise"] = noise;

  // Pairs come from the two-mode-squeezing interaction; an anti-Stokes
  // config reports what the same device would give pumped on the upper
  // supermode at the same power.
  PumpConfig sp = cfg.pump;
  sp.configuration = Configuration::Stokes;
  ordered_json pr;
  pr["configuration"] = "stokes";
  try {
    const PairRate r = pair_rate(detuned_operating_point(cfg.device, sp, cfg.pump_detuning, 0));
    pr["eta0"] = r.eta0;
    pr["cooperativity"] = r.cooperativity;
    pr["closed_form_raw"] = r.closed_form_raw;
    pr["numeric_raw"] = number_or_null(r.numeric_raw);
    pr["closed_form_hz"] = r.closed_form_hz;
    pr["numeric_hz"] = number_or_null(r.numeric_hz);
    pr["note"] = r.convention_note;
    const double n_th = n_thermal(mode.omega_m, T_noise);
    const CrossCorrelation g = g2_cross(detuned_operating_point(cfg.device, sp, cfg.pump_detuning, 0), 0.0, n_th);
    pr["g2_cross"] = number_or_null(g.g2);
    pr["cauchy_schwarz_bound"] = g.bound;
    pr["violates_cauchy_schwarz"] = g.violates_cauchy_schwarz;
  } catch (const InstabilityError& ex) {
    pr["closed_form_raw"] = nullptr;
    pr["note"] = std::string("Stokes operation unstable at this power: ") + ex.what();
  }
  j["pair_rate"] = pr;
  emit(ctx, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and calibrate a cavity electro-optomechanical transducer"};
  app.require_subcommand(1);
  Context ctx;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool needs_grid) {
    sub->add_option("--config", ctx.config_path, "config file (unit-suffixed keys)");
    sub->add_option("--out", ctx.out_path, "output path (default stdout)");
    sub->add_option("--seed", seed, "u64 recorded in output metadata");
    if (needs_grid) sub->add_option("--grid", ctx.grid, "start_hz,stop_hz,n (overrides sweep.*)");
  };
  auto* spectrum = app.add_subcommand("spectrum", "transduction spectrum vs microwave frequency");
  add_common(spectrum, true);
  auto* power = app.add_subcommand("power-sweep", "efficiencies vs off-chip pump power");
  add_common(power, false);
  auto* pulse = app.add_subcommand("pulse", "pulsed down-conversion through a lock-in");
  add_common(pulse, false);
  auto* budget = app.add_subcommand("budget", "efficiency ledger, decoherence, noise, pair rate");
  add_common(budget, false);
  auto* fit = app.add_subcommand("fit", "fit measured data, JSON report");
  std::string fit_kind, fit_data;
  fit->add_option("kind", fit_kind, "doublet | s11 | power | step | photothermal")->required();
  fit->add_option("data", fit_data, "CSV data file")->required();
  add_common(fit, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  for (auto* sub : app.get_subcommands()) {
    ctx.command = sub->get_name();
    if (sub->count("--seed")) ctx.seed = seed;
  }
  try {
    if (ctx.command == "spectrum") return cmd_spectrum(ctx);
    if (ctx.command == "power-sweep") return cmd_power_sweep(ctx);
    if (ctx.command == "pulse") return cmd_pulse(ctx);
    if (ctx.command == "budget") return cmd_budget(ctx);
    if (ctx.command == "fit") {
      ctx.command = "fit " + fit_kind;
      return cmd_fit(ctx, fit_kind, fit_data);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const InstabilityError& e) {
    std::cerr << "unstable: " << e.what() << '\n';
    return kInstability;
  } catch (const UnboundedNoise& e) {
    std::cerr << "unstable: " << e.what() << '\n';
    return kInstability;
  }
  return kConfig;
}
