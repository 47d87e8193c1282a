#pragma once

// Closed-form transfer functions and conversion efficiencies of the
// triply resonant transducer in the resolved-sideband approximation.
//
// Frequency bookkeeping: `w` is always the microwave offset, the microwave
// tone sitting at omega_m + w. The optical signal sits at omega_L + omega_m + w
// (anti-Stokes) or omega_L - omega_m - w (Stokes). Stokes optical quantities
// are returned in the conjugate frame (S_{a_out^dag <- c_in} etc.), which is
// what the matching flow graph evaluates.

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "triad/errors.hpp"
#include "triad/hybridize.hpp"
#include "triad/spectrum.hpp"
#include "triad/transducer_graphs.hpp"

namespace triad {

using sfg::Port;

inline double cooperativity(double g_eff, double kappa_o, double kappa_m) {
  detail::require(kappa_o > 0.0 && kappa_m > 0.0, "cooperativity: rates must be positive");
  return 4.0 * g_eff * g_eff / (kappa_o * kappa_m);
}

/// Internal efficiency 4C / (1 +- C)^2 (+ anti-Stokes, - Stokes).
inline double eta_internal(double C, Configuration config) {
  detail::require(C >= 0.0, "eta_internal: cooperativity must be non-negative");
  if (config == Configuration::AntiStokes) return 4.0 * C / ((1.0 + C) * (1.0 + C));
  if (C >= 1.0) throw InstabilityError("Stokes cooperativity >= 1: parametric instability");
  return 4.0 * C / ((1.0 - C) * (1.0 - C));
}

inline double eta_extraction(double eta_o, double eta_m) { return eta_o * eta_m; }

/// (kappa_ex,o / kappa_o)(kappa_ex,m / kappa_m) for the converting supermode.
inline double eta_extraction(const OperatingPoint& op) {
  return (op.kappa_ex_o() / op.kappa_o()) * op.mech.eta_m();
}

inline double eta_extraction(const DeviceParams& params, Configuration config) {
  validate(params);
  const Supermodes s = supermodes(params.left, params.right, params.J);
  const double eta_o = config == Configuration::AntiStokes ? s.eta_plus() : s.eta_minus();
  return eta_o * params.transduction_mode().eta_m();
}

namespace detail {

inline void require_stable(const OperatingPoint& op) {
  if (op.configuration == Configuration::Stokes && op.cooperativity() >= 1.0)
    throw InstabilityError("Stokes cooperativity >= 1: parametric instability");
}

}  // namespace detail

/// Closed-form S-parameter from `from` to `to` at microwave offset w.
inline cplx transfer(const OperatingPoint& op, Port from, Port to, double w) {
  detail::require_stable(op);
  const cplx i(0.0, 1.0);
  const double km = op.mech.kappa_m, kem = op.mech.kappa_ex_m;
  const double ko = op.kappa_o(), keo = op.kappa_ex_o();
  const double ks = op.kappa_spectator(), kes = op.kappa_ex_spectator();
  const cplx g = op.g();
  const cplx chi_m = susceptibility(km, w);
  const cplx chi_o = susceptibility(ko, w + op.signal_detuning);
  const cplx chi_s = susceptibility(ks, w + op.spectator_offset());
  const bool anti = op.configuration == Configuration::AntiStokes;
  const cplx det = anti ? 1.0 + std::norm(g) * chi_o * chi_m : 1.0 - std::norm(g) * chi_o * chi_m;
  const double root = std::sqrt(keo * kem);

  if (from == Port::Microwave && to == Port::Optical)
    return anti ? -i * root * g * chi_o * chi_m / det
                : i * root * std::conj(g) * chi_o * chi_m / det;
  if (from == Port::Optical && to == Port::Microwave)
    return anti ? i * root * std::conj(g) * chi_o * chi_m / det
                : i * root * g * chi_o * chi_m / det;
  if (from == Port::Microwave) return -1.0 + kem * chi_m / det;
  return 1.0 - keo * chi_o / det - kes * chi_s;
}

/// On-chip photon-number conversion efficiency |S_{o<-m}[w]|^2 (identical
/// for up- and down-conversion).
inline double onchip_efficiency(const OperatingPoint& op, double w) {
  return std::norm(transfer(op, Port::Microwave, Port::Optical, w));
}

/// Channels: eta_onchip, s_ac (optical <- microwave), s_ca, s_cc, s_aa.
inline Spectrum onchip_efficiency_spectrum(const OperatingPoint& op,
                                           const std::vector<double>& grid) {
  validate_grid(grid);
  detail::require_stable(op);
  Spectrum s;
  s.omega = grid;
  std::vector<cplx> eta(grid.size()), sac(grid.size()), sca(grid.size()), scc(grid.size()),
      saa(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid[k];
    sac[k] = transfer(op, Port::Microwave, Port::Optical, w);
    sca[k] = transfer(op, Port::Optical, Port::Microwave, w);
    scc[k] = transfer(op, Port::Microwave, Port::Microwave, w);
    saa[k] = transfer(op, Port::Optical, Port::Optical, w);
    eta[k] = std::norm(sac[k]);
  }
  s.add_channel("eta_onchip", std::move(eta));
  s.add_channel("s_ac", std::move(sac));
  s.add_channel("s_ca", std::move(sca));
  s.add_channel("s_cc", std::move(scc));
  s.add_channel("s_aa", std::move(saa));
  if (op.sideband_resolution() > 0.1)
    s.notes.push_back("kappa_o / omega_m = " + std::to_string(op.sideband_resolution()) +
                      ": outside the resolved-sideband regime");
  return s;
}

struct EfficiencyBudget {
  Configuration configuration = Configuration::AntiStokes;
  double power_in = 0.0;  // W
  double n_bar = 0.0;
  double C = 0.0;
  double C0 = 0.0;  // C / n_bar
  double eta_o = 0.0;
  double eta_m = 0.0;
  double eta_int = 0.0;
  double eta_ext = 0.0;
  double eta_oc = 0.0;
  double eta_tot = 0.0;         // exact chain eta_probes eta_fiber_chip eta_oc
  double eta_tot_linear = 0.0;  // low-cooperativity expansion, linear in power
  double eta_probes = 1.0;
  double eta_fiber_chip = 1.0;
  std::vector<std::pair<std::string, double>> ledger;  // stage -> factor
};

/// Low-cooperativity off-chip efficiency
/// 16 eta_probes eta_ff eta_m eta_o^2 C0 P_in / (hbar omega_L kappa_o).
inline double offchip_efficiency_linear(double C0, double eta_probes, double eta_fiber_chip,
                                        double eta_o, double eta_m, double kappa_o,
                                        double power_in, double omega_L) {
  return 16.0 * eta_probes * eta_fiber_chip * eta_fiber_chip * eta_m * eta_o * eta_o * C0 *
         power_in / (kHbar * omega_L * kappa_o);
}

inline EfficiencyBudget offchip_efficiency(const DeviceParams& params, const PumpConfig& pump) {
  const OperatingPoint op = operating_point(params, pump);
  EfficiencyBudget b;
  b.configuration = pump.configuration;
  b.power_in = pump.power_in;
  b.n_bar = op.n_bar;
  b.C = op.cooperativity();
  if (op.n_bar > 0.0) {
    b.C0 = b.C / op.n_bar;
  } else {
    PumpConfig ref = pump;
    ref.power_in = 1e-3;
    const OperatingPoint op_ref = operating_point(params, ref);
    b.C0 = op_ref.cooperativity() / op_ref.n_bar;
  }
  b.eta_o = op.kappa_ex_o() / op.kappa_o();
  b.eta_m = op.mech.eta_m();
  b.eta_int = eta_internal(b.C, pump.configuration);
  b.eta_ext = b.eta_o * b.eta_m;
  b.eta_oc = b.eta_ext * b.eta_int;
  b.eta_probes = params.losses.eta_probes;
  b.eta_fiber_chip = params.losses.eta_fiber_chip;
  b.eta_tot = b.eta_probes * b.eta_fiber_chip * b.eta_oc;

  // Linear chain: pumped-mode photon number grows linearly in P_in, eta_int ~ 4C.
  const bool anti = pump.configuration == Configuration::AntiStokes;
  const double k_pump = anti ? op.modes.kappa_minus : op.modes.kappa_plus;
  const double ke_pump = anti ? op.modes.kappa_ex_minus : op.modes.kappa_ex_plus;
  const double n_lin =
      intracavity_photons(ke_pump, k_pump, b.eta_fiber_chip * pump.power_in, pump.omega_L);
  b.eta_tot_linear = b.eta_probes * b.eta_fiber_chip * b.eta_ext * 4.0 * b.C0 * n_lin;

  b.ledger = {{"eta_probes", b.eta_probes}, {"eta_fiber_chip", b.eta_fiber_chip},
              {"eta_o", b.eta_o},           {"eta_m", b.eta_m},
              {"eta_int", b.eta_int}};
  return b;
}

/// Operating point for a pump detuned by `pump_detuning` from its supermode
/// and an arbitrary acoustic mode (no triple-resonance assumption).
inline OperatingPoint detuned_operating_point(const DeviceParams& params, const PumpConfig& pump,
                                              double pump_detuning, std::size_t mode_index) {
  validate(params);
  validate(pump);
  detail::require(mode_index < params.acoustic_modes.size(), "acoustic mode index out of range");
  OperatingPoint op;
  op.configuration = pump.configuration;
  op.modes = supermodes(params.left, params.right, params.J);
  op.mech = params.acoustic_modes[mode_index];
  op.omega_L = pump.omega_L;

  const bool anti = pump.configuration == Configuration::AntiStokes;
  const double split = op.modes.delta_omega;
  const double det_minus = anti ? pump_detuning : pump_detuning + split;
  const double det_plus = anti ? pump_detuning - split : pump_detuning;
  const double s_in =
      std::sqrt(photon_flux(params.losses.eta_fiber_chip * pump.power_in, pump.omega_L));
  const cplx am =
      std::sqrt(op.modes.kappa_ex_minus) * s_in / cplx(0.5 * op.modes.kappa_minus, -det_minus);
  const cplx ap =
      std::sqrt(op.modes.kappa_ex_plus) * s_in / cplx(0.5 * op.modes.kappa_plus, -det_plus);
  const auto [x, y] = left_ring_decomposition(op.modes);
  op.couplings = effective_couplings(params.g0, x, y, am, ap);
  op.n_bar = std::norm(anti ? am : ap);
  op.pump_detuning = pump_detuning;
  // Offset of the converted sideband from its supermode at w = 0.
  op.signal_detuning = anti ? pump_detuning + op.mech.omega_m - split
                            : op.mech.omega_m - split - pump_detuning;
  return op;
}

/// Total conversion efficiency against absolute microwave frequency, summing
/// the independent contributions of every acoustic mode.
inline Spectrum multimode_spectrum(const DeviceParams& params, const PumpConfig& pump,
                                   double pump_detuning, const std::vector<double>& omega_abs) {
  validate_grid(omega_abs);
  Spectrum s;
  s.omega = omega_abs;
  std::vector<double> total(omega_abs.size(), 0.0);
  const auto& modes = params.acoustic_modes;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const OperatingPoint op = detuned_operating_point(params, pump, pump_detuning, k);
    detail::require_stable(op);
    for (std::size_t i = 0; i < omega_abs.size(); ++i)
      total[i] += onchip_efficiency(op, omega_abs[i] - op.mech.omega_m);
  }
  for (std::size_t k = 0; k < modes.size(); ++k)
    for (std::size_t j = k + 1; j < modes.size(); ++j) {
      const double sep = std::abs(modes[j].omega_m - modes[k].omega_m);
      if (sep < 3.0 * std::max(modes[k].kappa_m, modes[j].kappa_m))
        s.notes.push_back("acoustic modes " + std::to_string(k) + " and " + std::to_string(j) +
                          " overlap (separation < 3 kappa_m); incoherent sum is approximate");
    }
  s.add_channel("eta_onchip", total);
  return s;
}

/// Full width at half maximum of |values| by linear interpolation between
/// grid points.
inline double fwhm(const std::vector<double>& omega, const std::vector<double>& values) {
  validate_grid(omega);
  detail::require(values.size() == omega.size() && omega.size() >= 3,
                  "fwhm: need at least three points");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[peak]) peak = i;
  if (peak == 0 || peak + 1 == values.size())
    throw InvalidParameter("fwhm: maximum on the grid boundary; widen the span");
  const double half = 0.5 * values[peak];

  std::size_t l = peak;
  while (l > 0 && values[l] > half) --l;
  std::size_t r = peak;
  while (r + 1 < values.size() && values[r] > half) ++r;
  if (values[l] > half || values[r] > half)
    throw InvalidParameter("fwhm: half maximum not reached inside the grid");

  auto cross = [&](std::size_t below, std::size_t above) {
    const double t = (half - values[below]) / (values[above] - values[below]);
    return omega[below] + t * (omega[above] - omega[below]);
  };
  const double width = cross(r, r - 1) - cross(l, l + 1);
  const double step = (omega.back() - omega.front()) / static_cast<double>(omega.size() - 1);
  if (width < 8.0 * step) throw InvalidParameter("fwhm: fewer than 8 grid points per linewidth");
  return width;
}

inline double fwhm(const Spectrum& s, const std::string& label = "eta_onchip") {
  const std::size_t ch = s.channel(label);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::abs(s.values[ch][i]);
  return fwhm(s.omega, v);
}

struct CouplingOptimum {
  double R_opt = 1.0;
  double eta_peak = 0.0;
  std::vector<std::pair<double, double>> curve;  // (R, eta_tot)
};

/// eta_tot(R) = F R^2 / (1 + R)^4 with R = Q_int / Q_ex; maximal at R = 1.
inline double coupling_efficiency(double F, double R) {
  return F * R * R / std::pow(1.0 + R, 4);
}

inline CouplingOptimum optimal_coupling(double F, std::size_t curve_points = 201) {
  detail::require(F > 0.0, "optimal_coupling: F must be positive");
  CouplingOptimum o;
  o.R_opt = 1.0;
  o.eta_peak = F / 16.0;
  for (std::size_t i = 0; i < curve_points; ++i) {
    const double R =
        std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(curve_points - 1));
    o.curve.emplace_back(R, coupling_efficiency(F, R));
  }
  return o;
}

}  // namespace triad
