#pragma once

#include <numbers>

// Library-wide units: lengths in mm (crystal) and nm (wavelengths, poling),
// times in ps, angular frequencies in rad/ps, wavenumbers in rad/mm.
namespace spdc::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c_mm_per_ps = 0.299792458;
inline constexpr double c_nm_per_ps = 299792.458;

inline constexpr double omega_from_nm(double lambda_nm) { return 2.0 * pi * c_nm_per_ps / lambda_nm; }
inline constexpr double nm_from_omega(double omega) { return 2.0 * pi * c_nm_per_ps / omega; }
inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// idler wavelength from energy conservation 1/lp = 1/ls + 1/li
inline constexpr double complement_nm(double pump_nm, double other_nm) {
    return 1.0 / (1.0 / pump_nm - 1.0 / other_nm);
}

}  // namespace spdc::units
