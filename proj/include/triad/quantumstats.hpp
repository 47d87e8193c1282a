#pragma once

// Thermal occupancy, added noise, spontaneous pair rate and the optical-
// microwave cross-correlation of the transducer.
//
// Noise operators are reduced to stationary mean occupancies: linear cross
// terms vanish for thermal or vacuum inputs, so only |S|^2 ratios survive.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "triad/errors.hpp"
#include "triad/hybridize.hpp"
#include "triad/response.hpp"
#include "triad/units.hpp"

namespace triad {

/// Bose-Einstein occupancy 1 / (exp(hbar omega / kB T) - 1).
inline double n_thermal(double omega, double T) {
  detail::require(omega > 0.0, "n_thermal: omega must be positive");
  detail::require(T >= 0.0, "n_thermal: temperature must be non-negative");
  if (T == 0.0) return 0.0;
  const double x = kHbar * omega / (kBoltzmann * T);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

/// Thermal decoherence rate (kappa_m / 2pi) n_th, in Hz.
inline double decoherence_rate(double kappa_m, double n_th) {
  detail::require(kappa_m >= 0.0 && n_th >= 0.0, "decoherence_rate: negative input");
  return angular_to_hz(kappa_m) * n_th;
}

class ThermalEnvironment {
 public:
  explicit ThermalEnvironment(double temperature) : T_(temperature) {
    detail::require(T_ >= 0.0, "temperature must be non-negative");
  }

  double temperature() const { return T_; }

  double occupancy(double omega) const {
    auto it = cache_.find(omega);
    if (it != cache_.end()) return it->second;
    const double n = n_thermal(omega, T_);
    cache_.emplace(omega, n);
    return n;
  }

 private:
  double T_;
  mutable std::map<double, double> cache_;
};

struct PairRate {
  double closed_form_raw = 0.0;   // integral over rad/s
  double numeric_raw = 0.0;
  double closed_form_hz = 0.0;    // integral over d omega / 2pi, photons/s
  double numeric_hz = 0.0;
  double eta0 = 0.0;
  double cooperativity = 0.0;
  std::string convention_note;
};

/// (pi/2)(1/kappa_- + 1/kappa_m)^-1 eta0, integrated over angular frequency.
inline double pair_rate_closed_form(double eta0, double kappa_minus, double kappa_m) {
  detail::require(kappa_minus > 0.0 && kappa_m > 0.0, "pair_rate: linewidths must be positive");
  return 0.5 * std::numbers::pi * eta0 / (1.0 / kappa_minus + 1.0 / kappa_m);
}

/// Trapezoid integral of eta_-[w] dw. The step resolves the narrower of the
/// two linewidths and the span covers many of the wider one; `refine`
/// divides the step.
inline double pair_rate_numeric(const OperatingPoint& op, double refine = 1.0) {
  detail::require(op.configuration == Configuration::Stokes, "pair_rate: Stokes configuration only");
  detail::require_stable(op);
  const double narrow = std::min(op.kappa_o(), op.mech.kappa_m);
  const double wide = std::max(op.kappa_o(), op.mech.kappa_m);
  const double span = 400.0 * wide;
  const double step = narrow / (40.0 * refine);
  const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * span / step)) + 1;
  const double h = 2.0 * span / static_cast<double>(n - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = -span + h * static_cast<double>(i);
    const double v = onchip_efficiency(op, w);
    sum += (i == 0 || i + 1 == n) ? 0.5 * v : v;
  }
  return sum * h;
}

inline PairRate pair_rate(const OperatingPoint& op) {
  detail::require(op.configuration == Configuration::Stokes, "pair_rate: Stokes configuration only");
  detail::require_stable(op);
  PairRate r;
  r.cooperativity = op.cooperativity();
  r.eta0 = onchip_efficiency(op, 0.0);
  r.closed_form_raw = pair_rate_closed_form(r.eta0, op.kappa_o(), op.mech.kappa_m);
  r.numeric_raw = r.eta0 > 0.0 ? pair_rate_numeric(op) : 0.0;
  r.closed_form_hz = r.closed_form_raw / kTwoPi;
  r.numeric_hz = r.numeric_raw / kTwoPi;
  r.convention_note =
      "*_hz integrates eta over d(omega)/2pi (photons/s); *_raw integrates over omega in rad/s";
  return r;
}

inline PairRate pair_rate(const DeviceParams& params, const PumpConfig& pump) {
  detail::require(pump.configuration == Configuration::Stokes, "pair_rate: Stokes configuration only");
  return pair_rate(operating_point(params, pump));
}

/// Closed form from an externally quoted band-centre efficiency; no numeric
/// counterpart since the line shape is not known.
inline PairRate pair_rate_from_eta0(double eta0, double kappa_minus, double kappa_m) {
  PairRate r;
  r.eta0 = eta0;
  r.closed_form_raw = pair_rate_closed_form(eta0, kappa_minus, kappa_m);
  r.closed_form_hz = r.closed_form_raw / kTwoPi;
  r.numeric_raw = std::numeric_limits<double>::quiet_NaN();
  r.numeric_hz = r.numeric_raw;
  r.convention_note =
      "*_hz integrates eta over d(omega)/2pi (photons/s); *_raw integrates over omega in rad/s";
  return r;
}

struct NoiseReport {
  Configuration configuration = Configuration::AntiStokes;
  double omega = 0.0;
  double eta = 0.0;
  double n_added_up = 0.0;
  double n_added_down = 0.0;
  // Breakdown. Up-conversion: optical leakage + squeezing floor (+ thermal
  // for Stokes). Down-conversion: microwave thermal backscatter + floor.
  double up_optical_leakage = 0.0;
  double up_squeezing_floor = 0.0;
  double up_microwave_thermal = 0.0;
  double down_microwave_thermal = 0.0;
  double down_squeezing_floor = 0.0;
};

/// Input-referred added noise at microwave offset `w`. `n_optical_in` is the
/// mean occupancy of the optical input port at the signal frequency.
inline NoiseReport added_noise(const OperatingPoint& op, double w, const ThermalEnvironment& env,
                               double n_optical_in = 0.0) {
  detail::require(n_optical_in >= 0.0, "added_noise: negative optical occupancy");
  detail::require_stable(op);
  const double n_th = env.occupancy(op.mech.omega_m + w);
  const double s_ac = std::norm(transfer(op, Port::Microwave, Port::Optical, w));
  const double s_ca = std::norm(transfer(op, Port::Optical, Port::Microwave, w));
  const double s_aa = std::norm(transfer(op, Port::Optical, Port::Optical, w));
  const double s_cc = std::norm(transfer(op, Port::Microwave, Port::Microwave, w));
  if (!(s_ac > 0.0) || !(s_ca > 0.0))
    throw UnboundedNoise("conversion efficiency vanishes; input-referred noise diverges");

  NoiseReport r;
  r.configuration = op.configuration;
  r.omega = w;
  r.eta = s_ac;
  r.up_optical_leakage = s_aa / s_ac * n_optical_in;
  r.down_microwave_thermal = s_cc / s_ca * n_th;
  if (op.configuration == Configuration::Stokes) {
    r.up_squeezing_floor = 1.0;
    r.up_microwave_thermal = n_th;
    r.down_squeezing_floor = 1.0;
  }
  r.n_added_up = r.up_optical_leakage + r.up_squeezing_floor + r.up_microwave_thermal;
  r.n_added_down = r.down_microwave_thermal + r.down_squeezing_floor;
  return r;
}

struct CrossCorrelation {
  double g2 = 0.0;
  double bound = 2.0;  // sqrt(g_aa g_cc) with both marginals thermal
  bool violates_cauchy_schwarz = false;
  std::string assumption = "g_aa = g_cc = 2 (thermal marginals)";
};

/// Optical-microwave g2 for spontaneous down-conversion (no coherent
/// inputs) at microwave offset `w`.
inline CrossCorrelation g2_cross(const OperatingPoint& op, double w, double n_th) {
  detail::require(op.configuration == Configuration::Stokes, "g2_cross: Stokes configuration only");
  detail::require(n_th >= 0.0, "g2_cross: negative thermal occupancy");
  detail::require_stable(op);
  // Conjugate-frame closed forms -> the operator ordering of the formula:
  // S_aa = conj(T_oo), S_{a<-c^dag} = conj(T_mo), S_{c<-a^dag} = T_om, S_cc = T_mm.
  const cplx t_oo = transfer(op, Port::Optical, Port::Optical, w);
  const cplx t_mo = transfer(op, Port::Microwave, Port::Optical, w);
  const cplx t_om = transfer(op, Port::Optical, Port::Microwave, w);
  const cplx t_mm = transfer(op, Port::Microwave, Port::Microwave, w);
  const double eta = std::norm(t_mo);
  if (!(eta > 0.0)) throw UnboundedNoise("g2_cross: eta_- vanishes");

  const double saa2 = std::norm(t_oo), scc2 = std::norm(t_mm);
  const double denom = (eta + scc2 * n_th) * (1.0 + n_th);
  const cplx cross = t_oo * std::conj(t_mo) * std::conj(t_om) * t_mm;
  CrossCorrelation c;
  c.g2 = (saa2 + eta) / denom + n_th / (1.0 + n_th) + 2.0 * cross.real() * n_th / (eta * denom);
  c.violates_cauchy_schwarz = c.g2 > c.bound;
  return c;
}

}  // namespace triad
