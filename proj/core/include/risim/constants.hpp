#pragma once

#include <cmath>

namespace risim::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double speed_of_light = 299792458.0;          // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double vacuum_permeability = 1.25663706212e-6; // H/m

// sqrt(mu0/eps0), ~376.73 ohm
inline const double free_space_impedance =
    std::sqrt(vacuum_permeability / vacuum_permittivity);

} // namespace risim::constants

namespace risim {

/// Wraps an angle into [-pi, pi).
inline double wrap_phase(double phi) {
  double w = std::fmod(phi + constants::pi, constants::two_pi);
  if (w < 0.0) w += constants::two_pi;
  return w - constants::pi;
}

/// Circular distance between two angles, in [0, pi].
inline double phase_distance(double a, double b) {
  return std::abs(wrap_phase(a - b));
}

/// Unnormalized sinc: sin(x)/x with sinc(0) = 1.
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

} // namespace risim
