#pragma once

namespace cpwall::constants {

/// Reduced Planck constant [J s], CODATA 2018 exact value.
inline constexpr double hbar = 1.054571817e-34;

/// Speed of light in vacuum [m/s], exact.
inline constexpr double c = 299792458.0;

/// Boltzmann constant [J/K], exact.
inline constexpr double k_B = 1.380649e-23;

inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace cpwall::constants
