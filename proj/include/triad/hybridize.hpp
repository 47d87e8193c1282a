#pragma once

// Photonic-molecule supermodes and pump-dressed optomechanical couplings.
//
// Two rings with complex eigenfrequencies lambda_o = i omega_o + kappa_o / 2,
// coupled at rate J, hybridize into a lower (symmetric, "-") and an upper
// (antisymmetric, "+") supermode. The acoustic mode couples to the left ring
// only, so the effective coupling of each supermode depends on how much of
// the left ring it contains.

#include <cmath>
#include <complex>
#include <utility>

#include "triad/errors.hpp"
#include "triad/model.hpp"

namespace triad {

using cplx = std::complex<double>;

struct Supermodes {
  double omega_minus = 0.0;
  double omega_plus = 0.0;
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  double kappa_ex_minus = 0.0;
  double kappa_ex_plus = 0.0;
  // a_pm = alpha_pm a_l + beta_pm a_r, |alpha|^2 + |beta|^2 = 1, arg(alpha) = 0.
  cplx alpha_minus{1.0, 0.0};
  cplx alpha_plus{0.0, 0.0};
  cplx beta_minus{0.0, 0.0};
  cplx beta_plus{1.0, 0.0};
  double delta_omega = 0.0;  // omega_plus - omega_minus
  double delta_kappa = 0.0;  // kappa_plus - kappa_minus

  double eta_minus() const { return kappa_ex_minus / kappa_minus; }
  double eta_plus() const { return kappa_ex_plus / kappa_plus; }
};

namespace detail {

// Null vector of [[l_l - lam, -iJ], [-iJ, l_r - lam]], normalized with the
// first nonzero component real and positive.
inline std::pair<cplx, cplx> ring_eigenvector(cplx lam_l, cplx lam_r, double J, cplx lam) {
  const cplx iJ(0.0, J);
  // Candidates built from each row; the larger one is numerically safer.
  cplx u1 = iJ, u2 = lam_l - lam;
  cplx v1 = lam_r - lam, v2 = iJ;
  const double nu = std::norm(u1) + std::norm(u2);
  const double nv = std::norm(v1) + std::norm(v2);
  cplx a = nu >= nv ? u1 : v1;
  cplx b = nu >= nv ? u2 : v2;
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  a /= n;
  b /= n;
  // Gauge: arg(alpha) = 0; fall back to arg(beta) = 0 when alpha vanishes.
  const double scale = std::max(std::abs(a), std::abs(b));
  if (std::abs(a) > 1e-15 * scale) {
    const cplx phase = std::conj(a) / std::abs(a);
    a *= phase;
    b *= phase;
    a = cplx(a.real(), 0.0);
  } else {
    a = 0.0;
    b = cplx(std::abs(b), 0.0);
  }
  return {a, b};
}

}  // namespace detail

/// Supermode frequencies, linewidths and participation amplitudes of two
/// coupled rings.
inline Supermodes supermodes(const OpticalModeBare& left, const OpticalModeBare& right,
                             double J) {
  validate(left, "left ring");
  validate(right, "right ring");
  detail::require(J >= 0.0, "supermodes: J must be non-negative");

  const double omega_bar = 0.5 * (left.omega + right.omega);
  const double kappa_bar = 0.5 * (left.kappa() + right.kappa());
  const double delta = left.omega - right.omega;
  const double mu = left.kappa() - right.kappa();

  Supermodes s;
  if (J == 0.0 && delta == 0.0 && mu == 0.0) {
    // Any basis diagonalizes a scalar matrix; keep the bare rings.
    s.omega_minus = s.omega_plus = omega_bar;
    s.kappa_minus = s.kappa_plus = kappa_bar;
    s.kappa_ex_minus = left.kappa_ex;
    s.kappa_ex_plus = right.kappa_ex;
    return s;
  }

  // lambda_+ - lambda_- = d with d^2 = (mu/2 + i delta)^2 - 4 J^2.
  const cplx z = std::pow(cplx(0.5 * mu, delta), 2) - 4.0 * J * J;
  cplx d = std::sqrt(z);
  if (d.imag() < 0.0 || (d.imag() == 0.0 && d.real() < 0.0)) d = -d;

  s.delta_omega = d.imag();
  s.delta_kappa = 2.0 * d.real();
  s.omega_minus = omega_bar - 0.5 * s.delta_omega;
  s.omega_plus = omega_bar + 0.5 * s.delta_omega;
  s.kappa_minus = kappa_bar - 0.5 * s.delta_kappa;
  s.kappa_plus = kappa_bar + 0.5 * s.delta_kappa;

  // Eigenvalues relative to their mean: absolute optical frequencies would
  // cancel catastrophically in lambda_l - lambda.
  const cplx lam_l(0.25 * mu, 0.5 * delta);
  const cplx lam_r = -lam_l;
  std::tie(s.alpha_minus, s.beta_minus) = detail::ring_eigenvector(lam_l, lam_r, J, -0.5 * d);
  std::tie(s.alpha_plus, s.beta_plus) = detail::ring_eigenvector(lam_l, lam_r, J, 0.5 * d);

  s.kappa_ex_minus =
      std::norm(s.alpha_minus) * left.kappa_ex + std::norm(s.beta_minus) * right.kappa_ex;
  s.kappa_ex_plus =
      std::norm(s.alpha_plus) * left.kappa_ex + std::norm(s.beta_plus) * right.kappa_ex;
  return s;
}

/// Inter-ring coupling that makes the supermode splitting equal omega_m for
/// the given bare rings (triple resonance).
inline double coupling_for_triple_resonance(const OpticalModeBare& left,
                                            const OpticalModeBare& right, double omega_m) {
  const double delta = left.omega - right.omega;
  const double mu = left.kappa() - right.kappa();
  const double re = mu * delta / (2.0 * omega_m);
  const double four_j2 = 0.25 * mu * mu - delta * delta - re * re + omega_m * omega_m;
  detail::require(four_j2 >= 0.0, "no real coupling reaches the requested splitting");
  return 0.5 * std::sqrt(four_j2);
}

/// Decomposition a_l = x a_- + y a_+ of the acoustically coupled ring.
inline std::pair<cplx, cplx> left_ring_decomposition(const Supermodes& s) {
  cplx x = std::conj(s.alpha_minus);
  cplx y = std::conj(s.alpha_plus);
  const double n = std::sqrt(std::norm(x) + std::norm(y));
  detail::require(n > 0.0, "left ring has no weight in either supermode");
  return {x / n, y / n};
}

/// Coherent intracavity amplitudes of both supermodes for a pump of flux
/// |s_in|^2 in the bus waveguide.
inline std::pair<cplx, cplx> steady_state_amplitudes(const Supermodes& s, const PumpConfig& pump,
                                                     double eta_fiber_chip, double omega_m) {
  validate(pump);
  const double flux = photon_flux(eta_fiber_chip * pump.power_in, pump.omega_L);
  const double s_in = std::sqrt(flux);
  const auto [det_minus, det_plus] = triple_resonance_detunings(pump.configuration, omega_m);
  const cplx a_minus =
      std::sqrt(s.kappa_ex_minus) * s_in / cplx(0.5 * s.kappa_minus, -det_minus);
  const cplx a_plus = std::sqrt(s.kappa_ex_plus) * s_in / cplx(0.5 * s.kappa_plus, -det_plus);
  return {a_minus, a_plus};
}

struct EffectiveCouplings {
  cplx g_minus{};
  cplx g_plus{};
  cplx alpha_ss_minus{};
  cplx alpha_ss_plus{};
};

/// Multi-photon couplings g_- = g0 (|x|^2 a_- + x* y a_+),
/// g_+ = g0 (|y|^2 a_+ + x y* a_-).
inline EffectiveCouplings effective_couplings(double g0, cplx x, cplx y, cplx alpha_ss_minus,
                                              cplx alpha_ss_plus) {
  if (std::abs(std::norm(x) + std::norm(y) - 1.0) > 1e-9)
    throw InvalidParameter("effective_couplings: decomposition (x, y) is not normalized");
  EffectiveCouplings c;
  c.alpha_ss_minus = alpha_ss_minus;
  c.alpha_ss_plus = alpha_ss_plus;
  c.g_minus = g0 * (std::norm(x) * alpha_ss_minus + std::conj(x) * y * alpha_ss_plus);
  c.g_plus = g0 * (std::norm(y) * alpha_ss_plus + x * std::conj(y) * alpha_ss_minus);
  return c;
}

/// Everything the linear-response modules need about one pumped device and
/// one acoustic mode. Built by operating_point(); tests may fill it directly.
struct OperatingPoint {
  Configuration configuration = Configuration::AntiStokes;
  Supermodes modes;
  EffectiveCouplings couplings;
  AcousticMode mech;
  double omega_L = 0.0;
  double n_bar = 0.0;  // photons in the pumped supermode
  // omega_L minus the pumped supermode frequency (0 at triple resonance).
  double pump_detuning = 0.0;
  // Offset of the converted sideband from its supermode at w = 0.
  double signal_detuning = 0.0;

  // Converting (signal) supermode: "+" for anti-Stokes, "-" for Stokes.
  double kappa_o() const {
    return configuration == Configuration::AntiStokes ? modes.kappa_plus : modes.kappa_minus;
  }
  double kappa_ex_o() const {
    return configuration == Configuration::AntiStokes ? modes.kappa_ex_plus
                                                      : modes.kappa_ex_minus;
  }
  // Spectator supermode: the pumped one, seen by the signal only as an
  // off-resonant reflection.
  double kappa_spectator() const {
    return configuration == Configuration::AntiStokes ? modes.kappa_minus : modes.kappa_plus;
  }
  double kappa_ex_spectator() const {
    return configuration == Configuration::AntiStokes ? modes.kappa_ex_minus
                                                      : modes.kappa_ex_plus;
  }
  // Offset of the signal from the spectator supermode at w = 0.
  double spectator_offset() const {
    return configuration == Configuration::AntiStokes ? mech.omega_m + pump_detuning
                                                      : mech.omega_m - pump_detuning;
  }
  cplx g() const {
    return configuration == Configuration::AntiStokes ? couplings.g_plus : couplings.g_minus;
  }
  double cooperativity() const { return 4.0 * std::norm(g()) / (kappa_o() * mech.kappa_m); }
  // kappa_pm / omega_m; the closed forms assume this is small.
  double sideband_resolution() const {
    return std::max(modes.kappa_minus, modes.kappa_plus) / mech.omega_m;
  }
};

/// Resonant intracavity photon number of the pumped supermode.
inline double intracavity_photons(const DeviceParams& params, const PumpConfig& pump) {
  validate(params);
  validate(pump);
  const Supermodes s = supermodes(params.left, params.right, params.J);
  const bool anti = pump.configuration == Configuration::AntiStokes;
  return intracavity_photons(anti ? s.kappa_ex_minus : s.kappa_ex_plus,
                             anti ? s.kappa_minus : s.kappa_plus,
                             params.losses.eta_fiber_chip * pump.power_in, pump.omega_L);
}

inline OperatingPoint operating_point(const DeviceParams& params, const PumpConfig& pump,
                                      std::size_t mode_index = 0) {
  validate(params);
  validate(pump);
  detail::require(mode_index < params.acoustic_modes.size(), "acoustic mode index out of range");
  OperatingPoint op;
  op.configuration = pump.configuration;
  op.modes = supermodes(params.left, params.right, params.J);
  op.mech = params.acoustic_modes[mode_index];
  op.omega_L = pump.omega_L;
  const auto [am, ap] =
      steady_state_amplitudes(op.modes, pump, params.losses.eta_fiber_chip, op.mech.omega_m);
  const auto [x, y] = left_ring_decomposition(op.modes);
  op.couplings = effective_couplings(params.g0, x, y, am, ap);
  op.n_bar = std::norm(pump.configuration == Configuration::AntiStokes ? am : ap);
  return op;
}

}  // namespace triad
