#pragma once

// Mean-field time-domain model of the linearized transducer.
//
// Envelopes are evolved in the frame of the converted signal: microwave
// fields relative to omega_m, optical fields relative to the signal
// sideband. The spectator supermode therefore rotates at spectator_offset().
// For the Stokes configuration the optical entries are the conjugate
// envelopes (a^dag), the same frame the flow graph and transfer() use; the
// physical envelope is their complex conjugate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "triad/errors.hpp"
#include "triad/hybridize.hpp"
#include "triad/response.hpp"
#include "triad/transducer_graphs.hpp"

namespace triad {

using Envelope = std::function<double(double t)>;

struct StateVector {
  cplx a_minus{};
  cplx a_plus{};
  cplx b{};
  cplx pump{1.0, 0.0};  // intracavity pump amplitude relative to steady state

  double quanta() const { return std::norm(a_minus) + std::norm(a_plus) + std::norm(b); }
};

/// Coherent tone entering `port` at microwave offset `offset`:
/// amplitude * envelope(t) * exp(-i offset t), in sqrt(quanta / s).
struct Drive {
  Port port = Port::Microwave;
  cplx amplitude{};
  double offset = 0.0;
  Envelope envelope;  // empty: always on
};

struct IntegrationOptions {
  double t_end = 0.0;
  double dt = 0.0;  // 0: choose from the fastest rate
  StateVector initial{};
  // Pump amplitude gate; the intracavity pump follows it with the pumped
  // supermode's ring-up. Empty: continuous pump at steady state.
  Envelope pump_envelope;
  std::size_t record_every = 1;
  double divergence_limit = 1e12;  // relative to the initial/drive scale
};

struct Trajectory {
  std::vector<double> t;
  std::vector<StateVector> x;
  std::vector<cplx> a_out;  // optical output, signal frame (conjugate for Stokes)
  std::vector<cplx> c_out;  // microwave output relative to omega_m
};

namespace detail {

struct Rhs {
  const OperatingPoint* op;
  const std::vector<Drive>* drives;
  const Envelope* pump_env;
  bool anti;
  double ds, wso;
  double km, kem, ko, keo, ks, kes, kp;
  cplx g;

  cplx input(Port p, double t) const {
    cplx s{};
    for (const auto& d : *drives) {
      if (d.port != p) continue;
      const double e = d.envelope ? d.envelope(t) : 1.0;
      s += d.amplitude * e * std::exp(cplx(0.0, -d.offset * t));
    }
    return s;
  }

  StateVector operator()(double t, const StateVector& x) const {
    const cplx i(0.0, 1.0);
    const cplx a_in = input(Port::Optical, t);
    const cplx c_in = input(Port::Microwave, t);
    const cplx gt = g * x.pump;
    const cplx a_sig = anti ? x.a_plus : x.a_minus;
    const cplx a_spec = anti ? x.a_minus : x.a_plus;
    const cplx d_sig = anti
        ? cplx(-0.5 * ko, ds) * a_sig + i * gt * x.b + std::sqrt(keo) * a_in
        : cplx(-0.5 * ko, ds) * a_sig - i * std::conj(gt) * x.b + std::sqrt(keo) * a_in;
    const cplx d_spec = cplx(-0.5 * ks, wso) * a_spec + std::sqrt(kes) * a_in;
    const cplx d_b = anti ? -0.5 * km * x.b + i * std::conj(gt) * a_sig + std::sqrt(kem) * c_in
                          : -0.5 * km * x.b + i * gt * a_sig + std::sqrt(kem) * c_in;
    StateVector dx;
    dx.a_plus = anti ? d_sig : d_spec;
    dx.a_minus = anti ? d_spec : d_sig;
    dx.b = d_b;
    dx.pump = *pump_env ? -0.5 * kp * (x.pump - (*pump_env)(t)) : cplx{};
    return dx;
  }

  cplx a_out(double t, const StateVector& x) const {
    const cplx a_sig = anti ? x.a_plus : x.a_minus;
    const cplx a_spec = anti ? x.a_minus : x.a_plus;
    return input(Port::Optical, t) - std::sqrt(keo) * a_sig - std::sqrt(kes) * a_spec;
  }

  cplx c_out(double t, const StateVector& x) const {
    return -input(Port::Microwave, t) + std::sqrt(kem) * x.b;
  }
};

inline StateVector axpy(const StateVector& x, double h, const StateVector& k) {
  StateVector y;
  y.a_minus = x.a_minus + h * k.a_minus;
  y.a_plus = x.a_plus + h * k.a_plus;
  y.b = x.b + h * k.b;
  y.pump = x.pump + h * k.pump;
  return y;
}

inline bool finite(const StateVector& x) {
  for (cplx v : {x.a_minus, x.a_plus, x.b, x.pump})
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline Rhs make_rhs(const OperatingPoint& op, const std::vector<Drive>& drives,
                    const Envelope& pump_env) {
  Rhs r{};
  r.op = &op;
  r.drives = &drives;
  r.pump_env = &pump_env;
  r.anti = op.configuration == Configuration::AntiStokes;
  r.ds = op.signal_detuning;
  r.wso = op.spectator_offset();
  r.km = op.mech.kappa_m;
  r.kem = op.mech.kappa_ex_m;
  r.ko = op.kappa_o();
  r.keo = op.kappa_ex_o();
  r.ks = op.kappa_spectator();
  r.kes = op.kappa_ex_spectator();
  r.kp = op.kappa_spectator();
  r.g = op.g();
  return r;
}

}  // namespace detail

/// Fastest rate (rad/s) the integrator has to resolve.
inline double fastest_rate(const OperatingPoint& op, const std::vector<Drive>& drives) {
  double r = std::max({op.modes.kappa_minus, op.modes.kappa_plus, op.mech.kappa_m,
                       std::abs(op.signal_detuning), std::abs(op.spectator_offset()),
                       2.0 * std::abs(op.g())});
  for (const auto& d : drives) r = std::max(r, std::abs(d.offset));
  return r;
}

/// Largest step allowed: 50 steps per period of the fastest rate.
inline double max_step(const OperatingPoint& op, const std::vector<Drive>& drives) {
  return kTwoPi / (50.0 * fastest_rate(op, drives));
}

/// Fixed-step RK4 integration from t = 0 to opts.t_end.
inline Trajectory integrate(const OperatingPoint& op, const std::vector<Drive>& drives,
                            const IntegrationOptions& opts) {
  detail::require(opts.t_end > 0.0, "integrate: t_end must be positive");
  detail::require(opts.record_every >= 1, "integrate: record_every must be >= 1");
  const double limit = max_step(op, drives);
  const double dt_req = opts.dt > 0.0 ? opts.dt : 0.25 * limit;
  if (dt_req > limit * (1.0 + 1e-12))
    throw InvalidParameter("integrate: dt exceeds 2pi / (50 * fastest rate) = " +
                           std::to_string(limit));
  const std::size_t steps = static_cast<std::size_t>(std::ceil(opts.t_end / dt_req));
  const double h = opts.t_end / static_cast<double>(steps);

  const detail::Rhs f = detail::make_rhs(op, drives, opts.pump_envelope);
  double scale = std::sqrt(opts.initial.quanta());
  for (const auto& d : drives) scale = std::max(scale, std::abs(d.amplitude));
  scale = std::max(scale, 1e-300) * opts.divergence_limit;

  Trajectory tr;
  tr.t.reserve(steps / opts.record_every + 2);
  StateVector x = opts.initial;
  x.pump = opts.pump_envelope ? opts.pump_envelope(0.0) : 1.0;
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.a_out.push_back(f.a_out(t, x));
    tr.c_out.push_back(f.c_out(t, x));
  };
  record(0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = h * static_cast<double>(n);
    const StateVector k1 = f(t, x);
    const StateVector k2 = f(t + 0.5 * h, detail::axpy(x, 0.5 * h, k1));
    const StateVector k3 = f(t + 0.5 * h, detail::axpy(x, 0.5 * h, k2));
    const StateVector k4 = f(t + h, detail::axpy(x, h, k3));
    x.a_minus += h / 6.0 * (k1.a_minus + 2.0 * k2.a_minus + 2.0 * k3.a_minus + k4.a_minus);
    x.a_plus += h / 6.0 * (k1.a_plus + 2.0 * k2.a_plus + 2.0 * k3.a_plus + k4.a_plus);
    x.b += h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    x.pump += h / 6.0 * (k1.pump + 2.0 * k2.pump + 2.0 * k3.pump + k4.pump);
    if (!detail::finite(x) || std::sqrt(x.quanta()) > scale)
      throw InstabilityError("integrate: trajectory diverged at t = " + std::to_string(t + h) +
                             " s");
    if ((n + 1) % opts.record_every == 0 || n + 1 == steps) record(t + h);
  }
  return tr;
}

/// Complex amplitude of exp(-i w t) in `y` over the last whole number of
/// periods of the record (or the last `window` seconds for w = 0).
inline cplx harmonic_amplitude(const std::vector<double>& t, const std::vector<cplx>& y, double w,
                               double window) {
  detail::require(t.size() == y.size() && t.size() >= 2, "harmonic_amplitude: bad record");
  double span = window;
  if (w != 0.0) {
    const double period = kTwoPi / std::abs(w);
    span = std::max(period, std::floor(window / period) * period);
  }
  const double t_start = t.back() - span;
  detail::require(t_start >= t.front(), "harmonic_amplitude: record shorter than window");
  cplx acc{};
  double norm = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k] <= t_start) continue;
    const double h = t[k] - std::max(t[k - 1], t_start);
    const cplx f0 = y[k - 1] * std::exp(cplx(0.0, w * t[k - 1]));
    const cplx f1 = y[k] * std::exp(cplx(0.0, w * t[k]));
    acc += 0.5 * h * (f0 + f1);
    norm += h;
  }
  return acc / norm;
}

/// Steady-state S-parameter from a CW drive, extracted from the integrator.
inline cplx simulated_transfer(const OperatingPoint& op, Port from, Port to, double w,
                               double settle_widths = 12.0) {
  const cplx amp{1.0, 0.0};
  std::vector<Drive> drives{{from, amp, w, {}}};
  double slow = std::min({op.mech.kappa_m, op.kappa_o()});
  // Parametric gain narrows the Stokes response to ~ (1 - C) of the bare width.
  if (op.configuration == Configuration::Stokes) slow *= std::max(1.0 - op.cooperativity(), 0.02);
  IntegrationOptions o;
  const double settle = settle_widths * 2.0 / slow;
  const double window = w != 0.0 ? std::max(2.0 / slow, kTwoPi / std::abs(w)) : 2.0 / slow;
  o.t_end = settle + window;
  const Trajectory tr = integrate(op, drives, o);
  const auto& y = to == Port::Optical ? tr.a_out : tr.c_out;
  return harmonic_amplitude(tr.t, y, w, window) / amp;
}

enum class PulseShape { Rect, RaisedCosine };

struct PulseSequence {
  double tau_on = 1e-6;     // s
  double f_rep = 100e3;     // Hz
  PulseShape shape = PulseShape::Rect;
  double edge_time = 0.0;   // s, raised-cosine edges
  double delay = 0.0;       // start of the first pulse

  void validate() const {
    detail::require(tau_on > 0.0 && f_rep > 0.0, "pulse: tau_on and f_rep must be positive");
    detail::require(tau_on * f_rep <= 1.0, "pulse: duty cycle tau_on * f_rep exceeds 1");
    detail::require(edge_time >= 0.0 && 2.0 * edge_time <= tau_on,
                    "pulse: edges longer than the pulse");
  }

  double operator()(double t) const {
    if (t < delay) return 0.0;
    const double local = std::fmod(t - delay, 1.0 / f_rep);
    if (local >= tau_on) return 0.0;
    if (shape == PulseShape::Rect || edge_time == 0.0) return 1.0;
    const double pi = std::numbers::pi;
    if (local < edge_time) return 0.5 * (1.0 - std::cos(pi * local / edge_time));
    if (local > tau_on - edge_time) return 0.5 * (1.0 - std::cos(pi * (tau_on - local) / edge_time));
    return 1.0;
  }
};

struct LockInConfig {
  double omega_ref = 0.0;
  double tau_rc = 0.0;

  void validate() const {
    detail::require(omega_ref > 0.0, "lock-in: reference frequency must be positive");
    detail::require(tau_rc > 0.0, "lock-in: tau_rc must be positive");
  }
};

struct LockInOutput {
  std::vector<double> t;
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> x;
  std::vector<double> y;
};

/// Quadrature mixing with the reference, then a single-pole RC low-pass:
/// X = LP(2 s cos w t), Y = LP(-2 s sin w t). A tone A cos(w t + phi) gives
/// X + iY -> A exp(i phi).
inline LockInOutput lockin_demodulate(const std::vector<double>& t, const std::vector<double>& s,
                                      const LockInConfig& cfg) {
  cfg.validate();
  detail::require(t.size() == s.size() && t.size() >= 2, "lock-in: bad record");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (1.0 / dt < 20.0 * cfg.omega_ref / kTwoPi)
    throw InvalidParameter("lock-in: sample rate below 20x the reference frequency");
  const double alpha = -std::expm1(-dt / cfg.tau_rc);
  LockInOutput o;
  o.t = t;
  o.amplitude.resize(t.size());
  o.phase.resize(t.size());
  o.x.resize(t.size());
  o.y.resize(t.size());
  double X = 0.0, Y = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double ph = cfg.omega_ref * t[k];
    X += alpha * (2.0 * s[k] * std::cos(ph) - X);
    Y += alpha * (-2.0 * s[k] * std::sin(ph) - Y);
    o.x[k] = X;
    o.y[k] = Y;
    o.amplitude[k] = std::hypot(X, Y);
    o.phase[k] = std::atan2(Y, X);
  }
  return o;
}

struct PulsedResult {
  LockInOutput lockin;
  Trajectory trajectory;
};

/// Pulsed-pump down-conversion: an optical tone at the signal sideband is
/// converted while the pump gate is open; the microwave output, carried at
/// omega_m, is demodulated by the lock-in (reference omega_m).
/// `optical_amplitude` is in sqrt(photons / s); a zero reference frequency
/// in `lockin` means omega_m.
inline PulsedResult pulsed_downconversion(const OperatingPoint& op, const PulseSequence& pulse,
                                          cplx optical_amplitude, const LockInConfig& lockin,
                                          double t_end, double dt = 0.0) {
  pulse.validate();
  const double carrier = op.mech.omega_m;
  LockInConfig cfg = lockin;
  if (cfg.omega_ref == 0.0) cfg.omega_ref = carrier;
  cfg.validate();
  detail::require_stable(op);
  std::vector<Drive> drives;
  drives.push_back({Port::Optical, optical_amplitude, 0.0, {}});
  IntegrationOptions o;
  o.t_end = t_end;
  const double limit = std::min(max_step(op, drives), kTwoPi / (50.0 * carrier));
  o.dt = dt > 0.0 ? dt : 0.5 * limit;
  o.pump_envelope = [pulse](double t) { return pulse(t); };
  // Idle optical input with the gate closed: the converted output starts
  // from rest.
  PulsedResult r;
  r.trajectory = integrate(op, drives, o);
  std::vector<double> sig(r.trajectory.t.size());
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const double t = r.trajectory.t[k];
    sig[k] = std::real(r.trajectory.c_out[k] * std::exp(cplx(0.0, -carrier * t)));
  }
  r.lockin = lockin_demodulate(r.trajectory.t, sig, cfg);
  return r;
}

struct PhotothermalModel {
  double a_kerr = 0.0;
  double a_local = 0.0;
  double f_local = 0.0;   // Hz
  double a_global = 0.0;
  double f_global = 0.0;  // Hz
};

/// H(f) = a_kerr + a_local / (1 + i f/f_local) + a_global / (1 + i f/f_global).
inline cplx photothermal_response(double f, const PhotothermalModel& m) {
  detail::require(m.f_local > 0.0 && m.f_global > 0.0, "photothermal: corners must be positive");
  detail::require(m.f_global < m.f_local, "photothermal: f_global must be below f_local");
  return m.a_kerr + m.a_local / cplx(1.0, f / m.f_local) + m.a_global / cplx(1.0, f / m.f_global);
}

/// CSV time-series export: t_s followed by the named channels.
inline void write_timeseries_csv(std::ostream& os, const std::vector<double>& t,
                                 const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& columns) {
  detail::require(names.size() == columns.size(), "timeseries: names/columns mismatch");
  for (const auto& c : columns)
    detail::require(c.size() == t.size(), "timeseries: column length mismatch");
  const auto old_prec = os.precision(12);
  os << "t_s";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << t[k];
    for (const auto& c : columns) os << ',' << c[k];
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace triad
