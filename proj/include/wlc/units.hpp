// Physical constants and unit conversions.
//
// Every frequency, detuning and linewidth inside the library is angular
// (rad/s). Cyclic values (Hz) are converted at the configuration boundary.
#pragma once

#include <numbers>

namespace wlc {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad_s(double hz) { return two_pi * hz; }
constexpr double rad_s_to_hz(double rad_s) { return rad_s / two_pi; }

/// Angular optical frequency of vacuum wavelength `lambda` (m).
constexpr double angular_frequency_from_wavelength(double lambda) {
  return two_pi * speed_of_light / lambda;
}

}  // namespace wlc
