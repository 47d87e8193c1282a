#pragma once

#include <optional>

#include "triad/triad.hpp"

namespace fixtures {

using namespace triad;

// Two rings and one HBAR overtone with the shipped device values.
inline DeviceParams device(double f_m_hz = 3.48e9) {
  DeviceParams d;
  const double wl = wavelength_to_angular(kDefaultWavelength);
  d.left = {wl, hz_to_angular(130e6), hz_to_angular(60e6)};
  d.right = {wl, hz_to_angular(94e6), hz_to_angular(60e6)};
  d.acoustic_modes = {{hz_to_angular(f_m_hz), hz_to_angular(13e6), hz_to_angular(1.43e6), 6e-12}};
  d.J = coupling_for_triple_resonance(d.left, d.right, d.acoustic_modes[0].omega_m);
  d.g0 = hz_to_angular(42.0);
  d.losses = {db_to_linear(-3.0), db_to_linear(-4.0)};
  return d;
}

inline PumpConfig pump(double dbm, Configuration c = Configuration::AntiStokes) {
  PumpConfig p;
  p.configuration = c;
  p.power_in = dbm_to_watts(dbm);
  return p;
}

// Operating point assembled by hand, cooperativity C, coupling phase `phase`.
inline OperatingPoint synthetic(Configuration c, double C, double phase = 0.4) {
  OperatingPoint op;
  op.configuration = c;
  op.modes.kappa_minus = hz_to_angular(150e6);
  op.modes.kappa_plus = hz_to_angular(110e6);
  op.modes.kappa_ex_minus = hz_to_angular(60e6);
  op.modes.kappa_ex_plus = hz_to_angular(55e6);
  op.modes.delta_omega = hz_to_angular(3.48e9);
  op.mech = {hz_to_angular(3.48e9), hz_to_angular(40e6), hz_to_angular(10e6), std::nullopt};
  const double ko = c == Configuration::AntiStokes ? op.modes.kappa_plus : op.modes.kappa_minus;
  const cplx g = std::polar(std::sqrt(C * ko * op.mech.kappa_m / 4.0), phase);
  op.couplings.g_plus = op.couplings.g_minus = g;
  op.omega_L = wavelength_to_angular(kDefaultWavelength);
  return op;
}

}  // namespace fixtures
