// Acceptance run: one PASS/FAIL line per criterion with wall time. Exit
// status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triad/triad.hpp"

using namespace triad;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

RunConfig paper_device() { return load_config_file(std::string(TRIAD_DATA_DIR) + "/paper_device.toml"); }

// A generic operating point with a sizeable cooperativity, built directly.
OperatingPoint synthetic_op(Configuration c, double C) {
  OperatingPoint op;
  op.configuration = c;
  op.modes.kappa_minus = hz_to_angular(150e6);
  op.modes.kappa_plus = hz_to_angular(110e6);
  op.modes.kappa_ex_minus = hz_to_angular(60e6);
  op.modes.kappa_ex_plus = hz_to_angular(55e6);
  op.modes.delta_omega = hz_to_angular(3.48e9);
  op.mech = {hz_to_angular(3.48e9), hz_to_angular(40e6), hz_to_angular(10e6), std::nullopt};
  const double ko = c == Configuration::AntiStokes ? op.modes.kappa_plus : op.modes.kappa_minus;
  const cplx g = std::polar(std::sqrt(C * ko * op.mech.kappa_m / 4.0), 0.7);
  op.couplings.g_plus = op.couplings.g_minus = g;
  op.omega_L = wavelength_to_angular(kDefaultWavelength);
  return op;
}

const Port kPorts[2] = {Port::Optical, Port::Microwave};

Outcome c1_g0_backcalc() {
  PowerFitFixed f;
  f.eta_probes = db_to_linear(-3);
  f.eta_fiber_fiber = db_to_linear(-8);
  f.eta_m = 0.11;
  f.eta_o = 0.35;
  f.kappa_o = hz_to_angular(170e6);
  f.kappa_m = hz_to_angular(13e6);
  f.omega_L = wavelength_to_angular(1550e-9);
  const FitReport r = fit_efficiency_power({dbm_to_watts(10)}, {db_to_linear(-60)}, f);
  const double C0 = r.value("C0"), g0 = angular_to_hz(r.value("g0"));
  Outcome o;
  o.pass = rel(C0, 8e-13) <= 0.05 && rel(g0, 42.0) <= 0.05;
  o.detail = fmt("C0 = %.4g (target 8e-13), g0 = 2pi x %.4g Hz (target 42)", C0, g0);
  return o;
}

Outcome c2_efficiency_chain() {
  RunConfig c = paper_device();
  c.pump.power_in = dbm_to_watts(21);
  const EfficiencyBudget b = offchip_efficiency(c.device, c.pump);
  const double tot_db = linear_to_db(b.eta_tot);
  Outcome o;
  o.pass = std::abs(tot_db + 48.0) <= 3.0 && rel(b.eta_oc, 7.9e-5) <= 0.30 && rel(b.eta_int, 2e-3) <= 0.30;
  o.detail = fmt("eta_tot = %.3f dB, eta_oc = %.4g, eta_int = %.4g", tot_db, b.eta_oc, b.eta_int);
  return o;
}

Outcome c3_decoherence() {
  const double wm = hz_to_angular(3.5e9), km = hz_to_angular(10e6);
  const double hot = decoherence_rate(km, n_thermal(wm, 0.8));
  const double cold = decoherence_rate(km, n_thermal(wm, 0.010));
  Outcome o;
  o.pass = rel(hot, 43e6) <= 0.02 && rel(cold, 0.5) <= 0.05;
  o.detail = fmt("800 mK: %.4g Hz, 10 mK: %.4g Hz", hot, cold);
  return o;
}

Outcome c4_xzpf() {
  const double x = x_zpf(6e-12, hz_to_angular(3.48e9));
  const double ref = std::sqrt(1.054571817e-34 / (2.0 * 6e-12 * 2.0 * std::numbers::pi * 3.48e9));
  Outcome o;
  o.pass = rel(x, 2e-17) <= 0.05 && rel(x, ref) < 1e-12;
  o.detail = fmt("x_zpf = %.4g m", x);
  return o;
}

Outcome c5_solver_equivalence() {
  oracle::Noise rng(5);
  double worst = 0.0;
  int graphs = 0, singular = 0;
  while (graphs < 1000) {
    const int n = 2 + static_cast<int>(rng.uniform(0, 9));  // 2..10 nodes
    sfg::FlowGraph g;
    for (int k = 0; k < n; ++k)
      g.add_node("n" + std::to_string(k),
                 k == 0 ? sfg::NodeRole::Source : (k == n - 1 ? sfg::NodeRole::Sink : sfg::NodeRole::Internal));
    const double p = rng.uniform(0.15, 0.35);
    for (int a = 0; a < n - 1; ++a)
      for (int b = 1; b < n; ++b) {
        if (rng.uniform(0, 1) > p && !(a == 0 && b == n - 1 && n == 2)) continue;
        const cplx c = std::polar(rng.uniform(0.05, 0.7), rng.uniform(-3.14, 3.14));
        const double tau = rng.uniform(0.0, 2.0);
        g.add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                   [c, tau](double w) { return c / cplx(1.0, w * tau); });
      }
    ++graphs;
    const double w = rng.uniform(-2.0, 2.0);
    try {
      const cplx m = sfg::mason_gain(g, "n0", "n" + std::to_string(n - 1), w).value;
      const cplx s = sfg::solve_gain(g, 0, static_cast<std::size_t>(n - 1), w);
      if (std::abs(s) > 1e-12) worst = std::max(worst, rel(m, s));
      else worst = std::max(worst, std::abs(m - s));
    } catch (const SingularGraph&) {
      ++singular;
    }
  }
  double worst_phys = 0.0;
  for (auto c : {Configuration::AntiStokes, Configuration::Stokes}) {
    const OperatingPoint op = synthetic_op(c, 0.5);
    const sfg::FlowGraph g = sfg::build_graph(op);
    for (int k = 0; k < 200; ++k) {
      const double w = hz_to_angular(-300e6 + 600e6 * k / 199.0);
      for (Port f : kPorts)
        for (Port t : kPorts) {
          const auto src = sfg::input_node(c, f), dst = sfg::output_node(c, t);
          worst_phys = std::max(worst_phys, rel(sfg::mason_gain(g, src, dst, w).value, sfg::solve_gain(g, src, dst, w)));
        }
    }
  }
  Outcome o;
  o.pass = worst <= 1e-10 && worst_phys <= 1e-10 && singular == 0;
  o.detail = fmt("random graphs: 1000 (singular %.0f), worst %.2e; physics graphs worst %.2e", singular, worst,
                 worst_phys);
  return o;
}

Outcome c6_closed_form_vs_graph() {
  double worst = 0.0;
  std::vector<OperatingPoint> ops;
  RunConfig paper = paper_device();
  ops.push_back(operating_point(paper.device, paper.pump));
  PumpConfig st = paper.pump;
  st.configuration = Configuration::Stokes;
  ops.push_back(operating_point(paper.device, st));
  ops.push_back(detuned_operating_point(paper.device, paper.pump, hz_to_angular(20e6), 0));
  ops.push_back(detuned_operating_point(paper.device, st, hz_to_angular(-15e6), 0));
  ops.push_back(synthetic_op(Configuration::AntiStokes, 3.0));
  ops.push_back(synthetic_op(Configuration::Stokes, 0.8));
  for (const auto& op : ops) {
    const sfg::FlowGraph g = sfg::build_graph(op);
    for (int k = 0; k < 101; ++k) {
      const double w = hz_to_angular(-200e6 + 400e6 * k / 100.0);
      for (Port f : kPorts)
        for (Port t : kPorts) {
          const cplx a = transfer(op, f, t, w);
          const cplx b = sfg::mason_gain(g, sfg::input_node(op.configuration, f),
                                         sfg::output_node(op.configuration, t), w).value;
          worst = std::max(worst, rel(a, b));
        }
    }
  }
  Outcome o;
  o.pass = worst <= 1e-10;
  o.detail = fmt("4 port pairs x 2 configurations x 3 devices, worst relative %.2e", worst);
  return o;
}

Outcome c7_time_vs_frequency() {
  double worst_mag = 0.0, worst_arg = 0.0;
  int points = 0;
  for (auto c : {Configuration::AntiStokes, Configuration::Stokes}) {
    const OperatingPoint op = synthetic_op(c, c == Configuration::Stokes ? 0.4 : 1.5);
    for (int k = 0; k < 10; ++k) {
      const double w = hz_to_angular(-45e6 + 10e6 * k);
      for (Port f : kPorts)
        for (Port t : kPorts) {
          const cplx ana = transfer(op, f, t, w);
          const cplx sim = simulated_transfer(op, f, t, w);
          worst_mag = std::max(worst_mag, rel(std::abs(sim), std::abs(ana)));
          worst_arg = std::max(worst_arg, std::abs(std::arg(sim / ana)));
        }
      ++points;
    }
  }
  Outcome o;
  o.pass = worst_mag <= 1e-3 && worst_arg <= 1e-3;
  o.detail = fmt("%.0f frequencies x 4 port pairs; worst |S| rel %.2e, worst arg %.2e rad", points, worst_mag,
                 worst_arg);
  return o;
}

Outcome c8_unitarity() {
  oracle::Noise rng(8);
  double worst_as = 0.0, worst_s = 0.0;
  for (int k = 0; k < 100; ++k) {
    DeviceParams d;
    const double wl = wavelength_to_angular(kDefaultWavelength);
    const double delta = hz_to_angular(rng.uniform(-200e6, 200e6));
    d.left = {wl + 0.5 * delta, 0.0, hz_to_angular(rng.uniform(40e6, 250e6))};
    d.right = {wl - 0.5 * delta, 0.0, hz_to_angular(rng.uniform(40e6, 250e6))};
    const double km = hz_to_angular(rng.uniform(1e6, 30e6));
    d.acoustic_modes = {{hz_to_angular(rng.uniform(2.5e9, 4.5e9)), km, km, std::nullopt}};
    d.J = coupling_for_triple_resonance(d.left, d.right, d.acoustic_modes[0].omega_m);
    d.g0 = hz_to_angular(rng.uniform(10, 200));
    const double C_target = rng.uniform(0.01, 0.9);
    for (auto c : {Configuration::AntiStokes, Configuration::Stokes}) {
      PumpConfig p;
      p.configuration = c;
      p.power_in = 1e-3;
      const double C1 = operating_point(d, p).cooperativity();
      p.power_in *= C_target / C1;
      const OperatingPoint op = operating_point(d, p);
      const double scc = std::norm(transfer(op, Port::Microwave, Port::Microwave, 0.0));
      const double eta = std::norm(transfer(op, Port::Microwave, Port::Optical, 0.0));
      if (c == Configuration::AntiStokes)
        worst_as = std::max(worst_as, std::abs(scc + eta - 1.0));
      else
        worst_s = std::max(worst_s, std::abs(scc - eta - 1.0));
    }
  }
  Outcome o;
  o.pass = worst_as <= 1e-10 && worst_s <= 1e-10;
  o.detail = fmt("100 draws; anti-Stokes |S_cc|^2+eta-1 <= %.2e, Stokes |S_cc|^2-eta-1 <= %.2e", worst_as, worst_s);
  return o;
}

Outcome c9_pair_rate() {
  RunConfig c = paper_device();
  c.pump.configuration = Configuration::Stokes;
  c.pump.power_in = dbm_to_watts(10);
  const OperatingPoint op = operating_point(c.device, c.pump);
  const PairRate r = pair_rate(op);
  const double num_err = rel(r.numeric_raw, r.closed_form_raw);
  oracle::Noise rng(9);
  double worst_int = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double a = rng.uniform(0.1, 10.0), b = rng.uniform(0.1, 10.0);
    const double id = std::numbers::pi * a * b / (a + b);
    const double integral = oracle::lorentz_product_integral(a, b);
    // the library's closed form takes full widths
    const double lib = pair_rate_closed_form(1.0, 2.0 * a, 2.0 * b);
    worst_int = std::max({worst_int, rel(integral, id), rel(lib, id)});
  }
  // the quoted inputs: eta_- = 6e-5 at 0 dBm, kappa_- = 2pi x 170 MHz, kappa_m = 2pi x 13 MHz
  const PairRate q = pair_rate_from_eta0(6e-5, hz_to_angular(170e6), hz_to_angular(13e6));
  Outcome o;
  o.pass = op.cooperativity() < 0.01 && num_err <= 5e-3 && worst_int <= 1e-3;
  o.detail = fmt("C=%.2e numeric/closed rel %.2e; integral identity worst %.2e; ", op.cooperativity(), num_err,
                 worst_int) +
             fmt("quoted inputs give %.4g /s (rad/s measure) or %.4g Hz (cyclic measure), not 190 Hz",
                 q.closed_form_raw, q.closed_form_hz);
  return o;
}

// ---- criterion 10 helpers: independent forward models
double doublet_oracle(double w, double kl, double kr, double kex, double J, double delta) {
  const oracle::Eig e = oracle::two_ring_eigen(0.5 * delta, kl, -0.5 * delta, kr, J);
  const cplx t = 1.0 - kex / cplx(0.5 * e.kappa_minus, -(w - e.omega_minus)) -
                 kex / cplx(0.5 * e.kappa_plus, -(w - e.omega_plus));
  return std::norm(t);
}

struct TrialStats {
  int trials = 0;
  int outside = 0;
  int failures = 0;  // fit threw or did not converge
  double worst_z = 0.0;
  double worst_rel = 0.0;
  std::vector<double> z;
  void check(double est, double sig, double truth) {
    const double zi = (est - truth) / sig;
    z.push_back(std::isfinite(zi) ? zi : 1e9);
    worst_z = std::max(worst_z, std::abs(z.back()));
    worst_rel = std::max(worst_rel, std::abs(est - truth) / std::abs(truth));
    if (!(std::abs(zi) <= 3.0)) ++outside;
  }
  double z_spread() const {
    double m = 0.0, s = 0.0;
    for (double v : z) m += v / static_cast<double>(z.size());
    for (double v : z) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(z.size() - 1));
  }
  // Exceedances a calibrated Gaussian estimator stays under 99% of the
  // time: binomial quantile at the two-sided 3-sigma tail mass.
  int allowed_outside() const {
    const double p = std::erfc(3.0 / std::sqrt(2.0));
    const int n = static_cast<int>(z.size());
    double cdf = 0.0;
    for (int k = 0; k <= n; ++k) {
      cdf += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * std::log(p) + (n - k) * std::log1p(-p));
      if (cdf >= 0.99) return k;
    }
    return n;
  }
};

TrialStats doublet_trials(double noise, int trials, std::uint64_t seed) {
  oracle::Noise rng(seed);
  const double kl = hz_to_angular(130e6), kr = hz_to_angular(94e6), kex = hz_to_angular(60e6),
               J = hz_to_angular(600e6);
  const std::vector<double> deltas = {0.0, hz_to_angular(500e6), hz_to_angular(1000e6)};
  TrialStats st;
  for (int n = 0; n < trials; ++n) {
    std::vector<DoubletTrace> traces;
    for (double dl : deltas) {
      DoubletTrace tr;
      for (int i = 0; i < 800; ++i) {
        const double w = hz_to_angular(-1.4e9 + 2.8e9 * i / 799.0);
        tr.omega.push_back(w);
        tr.transmission.push_back(doublet_oracle(w, kl, kr, kex, J, dl) + rng(noise));
      }
      traces.push_back(std::move(tr));
    }
    ++st.trials;
    try {
      const FitReport r = fit_doublet(traces);
      if (!r.converged) ++st.failures;
      st.check(r.value("kappa_l"), r.sigma("kappa_l"), kl);
      st.check(r.value("kappa_r"), r.sigma("kappa_r"), kr);
      st.check(r.value("kappa_ex"), r.sigma("kappa_ex"), kex);
      st.check(r.value("J"), r.sigma("J"), J);
    } catch (const Error&) {
      ++st.failures;
    }
  }
  return st;
}

TrialStats s11_trials(int trials, std::uint64_t seed) {
  oracle::Noise rng(seed);
  const double wm = hz_to_angular(3.48e9), Q = 268.0, eta = 0.11;
  const double kappa = wm / Q;
  TrialStats st;
  for (int n = 0; n < trials; ++n) {
    std::vector<double> w;
    std::vector<cplx> s;
    for (int i = 0; i < 400; ++i) {
      const double x = wm + kappa * (-4.0 + 8.0 * i / 399.0);
      const cplx ideal = -1.0 + eta * kappa / cplx(0.5 * kappa, -(x - wm));
      w.push_back(x);
      s.push_back(ideal + cplx(rng(0.02), rng(0.02)));
    }
    ++st.trials;
    try {
      const FitReport r = fit_s11(w, s);
      if (!r.converged) ++st.failures;
      st.check(r.value("omega_m"), r.sigma("omega_m"), wm);
      st.check(r.value("Q_m"), r.sigma("Q_m"), Q);
      st.check(r.value("eta_m"), r.sigma("eta_m"), eta);
    } catch (const Error&) {
      ++st.failures;
    }
  }
  return st;
}

TrialStats power_trials(int trials, std::uint64_t seed) {
  oracle::Noise rng(seed);
  PowerFitFixed f;
  f.eta_probes = db_to_linear(-3);
  f.eta_fiber_fiber = db_to_linear(-8);
  f.eta_m = 0.11;
  f.eta_o = 0.35;
  f.kappa_o = hz_to_angular(170e6);
  f.kappa_m = hz_to_angular(13e6);
  const double C0 = 8e-13;
  const double K = 16.0 * f.eta_probes * f.eta_fiber_fiber * f.eta_m * f.eta_o * f.eta_o /
                   (1.054571817e-34 * f.omega_L * f.kappa_o);
  TrialStats st;
  for (int n = 0; n < trials; ++n) {
    std::vector<double> P, y;
    for (int i = 0; i < 12; ++i) {
      const double p = dbm_to_watts(-10.0 + 2.5 * i);
      P.push_back(p);
      y.push_back(K * C0 * p * (1.0 + rng(0.02)));
    }
    ++st.trials;
    const FitReport r = fit_efficiency_power(P, y, f);
    st.check(r.value("C0"), r.sigma("C0"), C0);
    st.check(r.value("g0"), r.sigma("g0"), std::sqrt(f.kappa_o * f.kappa_m * C0));
  }
  return st;
}

TrialStats rc_trials(int trials, std::uint64_t seed) {
  oracle::Noise rng(seed);
  const double A = 1.0, t0 = 50e-9, tau = 30e-9;
  TrialStats st;
  for (int n = 0; n < trials; ++n) {
    std::vector<double> t, y;
    for (int i = 0; i < 500; ++i) {
      const double ti = 400e-9 * i / 499.0;
      t.push_back(ti);
      y.push_back((ti < t0 ? 0.0 : A * (1.0 - std::exp(-(ti - t0) / tau))) + rng(0.02 * A));
    }
    ++st.trials;
    try {
      const FitReport r = fit_rc_step(t, y);
      if (!r.converged) ++st.failures;
      st.check(r.value("tau_rc"), r.sigma("tau_rc"), tau);
      st.check(r.value("amplitude"), r.sigma("amplitude"), A);
      st.check(r.value("t0"), r.sigma("t0"), t0);
    } catch (const Error&) {
      ++st.failures;
    }
  }
  return st;
}

Outcome c10_fit_round_trips() {
  const TrialStats d2 = doublet_trials(0.02, 100, 101);
  const TrialStats d1 = doublet_trials(0.01, 100, 102);
  const TrialStats s = s11_trials(100, 103);
  const TrialStats p = power_trials(100, 104);
  const TrialStats rc = rc_trials(100, 105);
  Outcome o;
  std::ostringstream os;
  auto line = [&](const char* name, const TrialStats& t) {
    const double sd = t.z_spread();
    os << name << ": " << t.outside << "/" << t.z.size() << " beyond 3 sigma (allowed " << t.allowed_outside()
       << "), sd(z) " << fmt("%.2f", sd) << ", failures " << t.failures << "; ";
    if (t.outside > t.allowed_outside() || sd < 0.8 || sd > 1.25 || t.failures) o.pass = false;
  };
  line("doublet", d2);
  line("s11", s);
  line("power", p);
  line("rc", rc);
  os << "doublet at 1% noise worst relative error " << fmt("%.3g%%", 100 * d1.worst_rel);
  if (d1.worst_rel > 0.01 || d1.failures) o.pass = false;
  o.detail = os.str();
  return o;
}

Outcome c11_pulsed_response() {
  const RunConfig c = load_config_file(std::string(TRIAD_DATA_DIR) + "/fast_pulse.toml");
  const OperatingPoint op = operating_point(c.device, c.pump);
  const double flux = c.pulse.signal_power / (kHbar * c.pump.omega_L);
  const PulsedResult r = pulsed_downconversion(op, c.pulse.sequence, std::sqrt(flux),
                                               LockInConfig{0.0, c.pulse.tau_rc}, c.pulse.t_end);
  const FitReport f = fit_rc_step(r.lockin.t, r.lockin.amplitude);
  const double tau = f.value("tau_rc");
  const double bw_ratio = std::min(op.mech.kappa_m, op.kappa_o()) * c.pulse.tau_rc;
  Outcome o;
  o.pass = rel(tau, 30e-9) <= 0.05 && bw_ratio > 10.0;
  o.detail = fmt("fitted rise %.4g ns (transducer bandwidth x tau_rc = %.0f)", tau * 1e9, bw_ratio);
  return o;
}

Outcome c12_optimal_coupling() {
  const double F = 3.7e-3;
  const CouplingOptimum opt = optimal_coupling(F);
  auto eta = [F](double R) { return F * R * R / std::pow(1.0 + R, 4); };
  // nested grid search around the coarse maximum
  double lo = 0.01, hi = 100.0, best = 1.0;
  for (int level = 0; level < 12; ++level) {
    double best_v = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double R = lo + (hi - lo) * i / 1000.0;
      if (eta(R) > best_v) {
        best_v = eta(R);
        best = R;
      }
    }
    const double span = (hi - lo) / 100.0;
    lo = std::max(1e-6, best - span);
    hi = best + span;
  }
  Outcome o;
  o.pass = std::abs(opt.R_opt - best) <= 1e-6 && opt.eta_peak == F / 16.0 && coupling_efficiency(F, 1.0) == F / 16.0;
  o.detail = fmt("analytic R = %.9g, grid R = %.9g, peak/F = %.9g", opt.R_opt, best, opt.eta_peak / F);
  return o;
}

Outcome c13_fwhm() {
  double worst = 0.0;
  double device_fwhm = 0.0;
  RunConfig c = paper_device();
  std::vector<OperatingPoint> ops = {operating_point(c.device, c.pump),
                                     synthetic_op(Configuration::AntiStokes, 1e-4),
                                     synthetic_op(Configuration::Stokes, 1e-4)};
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& op = ops[k];
    const double ko = op.kappa_o(), km = op.mech.kappa_m;
    const double span = 4.0 * std::max(ko, km);
    std::vector<double> grid;
    for (int i = 0; i < 4001; ++i) grid.push_back(-span + 2.0 * span * i / 4000.0);
    const double w = fwhm(onchip_efficiency_spectrum(op, grid));
    worst = std::max(worst, rel(w, oracle::two_lorentzian_fwhm(ko, km)));
    if (k == 0) device_fwhm = angular_to_hz(w);
  }
  Outcome o;
  o.pass = worst <= 0.01;
  o.detail = fmt("worst relative deviation from quartic root %.2e; device model FWHM %.3g MHz "
                 "(measured 25 MHz not reproduced)",
                 worst, device_fwhm / 1e6);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "g0 back-calculation from efficiency", 1.0, c1_g0_backcalc},
      {2, "efficiency chain at 21 dBm", 1.0, c2_efficiency_chain},
      {3, "thermal decoherence rates", 1.0, c3_decoherence},
      {4, "zero-point displacement", 0.0, c4_xzpf},
      {5, "Mason vs linear solve", 30.0, c5_solver_equivalence},
      {6, "closed forms vs flow graphs", 0.0, c6_closed_form_vs_graph},
      {7, "RK4 steady state vs S-parameters", 60.0, c7_time_vs_frequency},
      {8, "unitarity / Bogoliubov identities", 0.0, c8_unitarity},
      {9, "pair-rate self-consistency", 0.0, c9_pair_rate},
      {10, "fit round-trips", 120.0, c10_fit_round_trips},
      {11, "pulsed response rise time", 0.0, c11_pulsed_response},
      {12, "optimal coupling", 0.0, c12_optimal_coupling},
      {13, "transduction FWHM vs quartic root", 0.0, c13_fwhm},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [runtime %.2f s exceeds %.0f s]", secs, c.budget_s);
    }
    if (!o.pass) ++failed;
    std::printf("%s  AC-%02d %-36s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
