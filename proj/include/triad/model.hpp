#pragma once

// Device description and elementary photon-budget quantities.
//
// Unit convention: every frequency and rate held by these types is angular
// (rad/s). Hz values are converted at the I/O boundary (see config.hpp).
// Powers are watts.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "triad/errors.hpp"
#include "triad/units.hpp"

namespace triad {

struct OpticalModeBare {
  double omega = 0.0;      // resonance
  double kappa_int = 0.0;  // intrinsic loss
  double kappa_ex = 0.0;   // bus-waveguide coupling

  double kappa() const { return kappa_int + kappa_ex; }
};

struct AcousticMode {
  double omega_m = 0.0;
  double kappa_m = 0.0;     // total linewidth
  double kappa_ex_m = 0.0;  // microwave port coupling
  std::optional<double> m_eff;  // kg

  double eta_m() const { return kappa_ex_m / kappa_m; }
};

enum class Configuration { AntiStokes, Stokes };

inline std::string to_string(Configuration c) {
  return c == Configuration::AntiStokes ? "anti-stokes" : "stokes";
}

struct PumpConfig {
  Configuration configuration = Configuration::AntiStokes;
  double power_in = 0.0;  // W, at the input fiber
  double omega_L = wavelength_to_angular(kDefaultWavelength);
};

// Pump-to-supermode detunings (Delta_-, Delta_+) = omega_L - omega_pm for an
// exactly triply resonant device.
inline std::pair<double, double> triple_resonance_detunings(Configuration c, double omega_m) {
  if (c == Configuration::AntiStokes) return {0.0, -omega_m};
  return {omega_m, 0.0};
}

struct PortLosses {
  double eta_probes = 1.0;      // microwave probe transmission
  double eta_fiber_chip = 1.0;  // single-facet fiber-to-chip transmission

  double eta_fiber_fiber() const { return eta_fiber_chip * eta_fiber_chip; }
};

struct DeviceParams {
  OpticalModeBare left;   // ring carrying the acoustic actuator
  OpticalModeBare right;
  double J = 0.0;         // inter-ring coupling
  std::vector<AcousticMode> acoustic_modes;  // [0] is the transduction mode
  double g0 = 0.0;        // vacuum optomechanical rate to the left ring
  PortLosses losses;

  const AcousticMode& transduction_mode() const { return acoustic_modes.front(); }
};

inline void validate(const OpticalModeBare& m, const char* which) {
  using detail::require;
  const std::string w(which);
  require(m.omega > 0.0, w + ": optical frequency must be positive");
  require(m.kappa_int >= 0.0, w + ": intrinsic linewidth must be non-negative");
  require(m.kappa_ex >= 0.0, w + ": external coupling must be non-negative");
  require(m.kappa() > 0.0, w + ": total linewidth must be positive");
}

inline void validate(const AcousticMode& m) {
  using detail::require;
  require(m.omega_m > 0.0, "acoustic frequency must be positive");
  require(m.kappa_m > 0.0, "acoustic linewidth must be positive");
  require(m.kappa_ex_m >= 0.0 && m.kappa_ex_m <= m.kappa_m,
          "acoustic external coupling must lie in [0, kappa_m]");
  if (m.m_eff) require(*m.m_eff > 0.0, "effective mass must be positive");
}

inline void validate(const PortLosses& l) {
  detail::require(l.eta_probes > 0.0 && l.eta_probes <= 1.0, "eta_probes must lie in (0, 1]");
  detail::require(l.eta_fiber_chip > 0.0 && l.eta_fiber_chip <= 1.0,
                  "eta_fiber_chip must lie in (0, 1]");
}

inline void validate(const PumpConfig& p) {
  detail::require(p.power_in >= 0.0, "pump power must be non-negative");
  detail::require(p.omega_L > 0.0, "pump frequency must be positive");
}

inline void validate(const DeviceParams& d) {
  using detail::require;
  validate(d.left, "left ring");
  validate(d.right, "right ring");
  require(d.J >= 0.0, "inter-ring coupling must be non-negative");
  require(d.g0 >= 0.0, "g0 must be non-negative");
  require(!d.acoustic_modes.empty(), "at least one acoustic mode is required");
  for (std::size_t i = 0; i < d.acoustic_modes.size(); ++i) {
    validate(d.acoustic_modes[i]);
    for (std::size_t j = 0; j < i; ++j)
      require(d.acoustic_modes[i].omega_m != d.acoustic_modes[j].omega_m,
              "acoustic mode frequencies must be distinct");
  }
  validate(d.losses);
}

/// Photon flux P / (hbar omega_L) carried by a beam of power `power`.
inline double photon_flux(double power, double omega_L) {
  detail::require(omega_L > 0.0, "photon_flux: frequency must be positive");
  detail::require(power >= 0.0, "photon_flux: power must be non-negative");
  return power / (kHbar * omega_L);
}

/// Zero-point motion sqrt(hbar / (2 m_eff omega_m)).
inline double x_zpf(double m_eff, double omega_m) {
  detail::require(m_eff > 0.0 && omega_m > 0.0, "x_zpf: mass and frequency must be positive");
  return std::sqrt(kHbar / (2.0 * m_eff * omega_m));
}

/// Resonantly pumped intracavity photon number
/// n = (kappa_ex / kappa) (4 / kappa) P_wg / (hbar omega_L).
inline double intracavity_photons(double kappa_ex, double kappa, double power_wg,
                                  double omega_L) {
  detail::require(kappa > 0.0, "intracavity_photons: linewidth must be positive");
  return (kappa_ex / kappa) * (4.0 / kappa) * photon_flux(power_wg, omega_L);
}

}  // namespace triad
