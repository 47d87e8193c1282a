#pragma once

#include <cmath>
#include <numbers>

namespace triad {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
inline constexpr double kSpeedOfLight = 299792458.0;   // m / s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Default pump wavelength: telecom C-band.
inline constexpr double kDefaultWavelength = 1550e-9;  // m

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double p_dbm) { return 1e-3 * db_to_linear(p_dbm); }
inline double watts_to_dbm(double p_w) { return linear_to_db(p_w / 1e-3); }

inline constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
inline constexpr double angular_to_hz(double w) { return w / kTwoPi; }

inline double wavelength_to_angular(double lambda_m) {
  return kTwoPi * kSpeedOfLight / lambda_m;
}

}  // namespace triad
