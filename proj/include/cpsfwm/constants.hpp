#pragma once

#include <numbers>

namespace cpsfwm::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;       // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

// Gaussian approximation sinc(x) ~ exp(-Gamma x^2) used by the mixed-pump
// bandwidth and threshold formulas.
inline constexpr double sinc_gaussian_gamma = 0.193;

// phi_P is indistinguishable from its Gaussian limit below this B.
inline constexpr double factorable_b_threshold = 0.14;

inline double omega_from_wavelength(double wavelength_m) {
    return 2.0 * pi * speed_of_light / wavelength_m;
}

inline double wavelength_from_omega(double omega) {
    return 2.0 * pi * speed_of_light / omega;
}

}  // namespace cpsfwm::constants
