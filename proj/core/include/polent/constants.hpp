#pragma once

#include <numbers>

namespace polent {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kNano = 1e-9;
inline constexpr double kFemto = 1e-15;

/// Exact vacuum conversion omega = 2 pi c / lambda. Used only at I/O boundaries.
constexpr double wavelength_to_omega(double wavelength_m) {
  return kTwoPi * kSpeedOfLight / wavelength_m;
}

constexpr double omega_to_wavelength(double omega) {
  return kTwoPi * kSpeedOfLight / omega;
}

}  // namespace polent
