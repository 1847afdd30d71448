#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class Species { KTP, KDP, BBO };
enum class Polarization { ordinary, extraordinary };
enum class Role { pump, signal, idler };

// n^2 = a + b/(L^2 - c) + d/(L^2 - e) + f L^2/(L^2 - g) + h L^2, L in um.
// Unused terms are zero; this covers the three fits bundled below.
struct SellmeierTerms {
    double a = 1.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, f = 0.0, g = 0.0, h = 0.0;

    double n2(double L) const {
        double L2 = L * L;
        return a + b / (L2 - c) + d / (L2 - e) + f * L2 / (L2 - g) + h * L2;
    }
    double dn2_dL(double L) const {
        double L2 = L * L;
        double t1 = L2 - c, t2 = L2 - e, t3 = L2 - g;
        return -2.0 * L * b / (t1 * t1) - 2.0 * L * d / (t2 * t2) - 2.0 * L * f * g / (t3 * t3) + 2.0 * h * L;
    }
};

struct SellmeierModel {
    SellmeierTerms ordinary;
    SellmeierTerms extraordinary;
    double lo_nm = 0.0;
    double hi_nm = 0.0;
    double temperature_k = 293.15;
    std::string_view source;

    void check(double lambda_nm) const {
        if (!(lambda_nm >= lo_nm && lambda_nm <= hi_nm)) throw OutOfValidityWindow(lambda_nm, lo_nm, hi_nm);
    }
};

namespace sellmeier {

// KTP, Kato & Takaoka, Appl. Opt. 41, 5040 (2002), 20 C.
// Treated uniaxially in the y-z plane: ordinary = n_y, extraordinary = n_z.
inline const SellmeierModel& ktp() {
    static const SellmeierModel m{
        {3.45018, 0.04341, 0.04597, 16.98825, 39.43799, 0, 0, 0},
        {4.59423, 0.06206, 0.04763, 110.80672, 86.12171, 0, 0, 0},
        430.0, 3540.0, 293.15, "Kato & Takaoka 2002 (KTP y, z)"};
    return m;
}

// KTP n_x from the same fit, for reference only.
inline SellmeierTerms ktp_x() { return {3.29100, 0.04140, 0.03978, 9.35522, 31.45571, 0, 0, 0}; }

// KDP, Zernike, J. Opt. Soc. Am. 54, 1215 (1964), room temperature.
inline const SellmeierModel& kdp() {
    static const SellmeierModel m{
        {2.259276, 0.01008956, 0.012942625, 0, 0, 13.00522, 400.0, 0},
        {2.132668, 0.008637494, 0.012281043, 0, 0, 3.2279924, 400.0, 0},
        213.8, 1529.0, 298.15, "Zernike 1964 (KDP)"};
    return m;
}

// beta-BBO, Nikogosyan, Appl. Phys. A 52, 359 (1991), 20 C.
// Window extended to the transparency edge so the idler of near-IR sweeps stays covered.
inline const SellmeierModel& bbo() {
    static const SellmeierModel m{
        {2.7359, 0.01878, 0.01822, 0, 0, 0, 0, -0.01354},
        {2.3753, 0.01224, 0.01667, 0, 0, 0, 0, -0.01516},
        190.0, 3500.0, 293.15, "Nikogosyan 1991 (BBO)"};
    return m;
}

}  // namespace sellmeier

inline const SellmeierModel& sellmeier_model(Species s) {
    switch (s) {
        case Species::KTP: return sellmeier::ktp();
        case Species::KDP: return sellmeier::kdp();
        case Species::BBO: return sellmeier::bbo();
    }
    return sellmeier::ktp();
}

inline std::string_view to_string(Species s) {
    switch (s) {
        case Species::KTP: return "KTP";
        case Species::KDP: return "KDP";
        case Species::BBO: return "BBO";
    }
    return "?";
}

inline std::optional<Species> parse_species(std::string_view s) {
    if (s == "KTP" || s == "ktp" || s == "PPKTP" || s == "ppktp") return Species::KTP;
    if (s == "KDP" || s == "kdp") return Species::KDP;
    if (s == "BBO" || s == "bbo") return Species::BBO;
    return std::nullopt;
}

struct CrystalConfig {
    Species species = Species::KTP;
    double length_mm = 10.0;
    double theta_deg = 90.0;
    std::optional<double> poling_period_nm;
    int qpm_order = 1;
    // API-level override of the bundled fit (toy media in tests)
    std::optional<SellmeierModel> custom_model;

    const SellmeierModel& model() const { return custom_model ? *custom_model : sellmeier_model(species); }
    double temperature_k() const { return model().temperature_k; }

    void validate() const {
        if (!(length_mm > 0)) throw Error("InvalidCrystal", "length must be positive");
        if (poling_period_nm && !(*poling_period_nm > 0)) throw Error("InvalidCrystal", "poling period must be positive");
        if (qpm_order % 2 == 0) throw Error("InvalidCrystal", "QPM order must be odd");
        if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) throw Error("InvalidCrystal", "tuning angle must lie in [0, 90] deg");
    }
};

struct WaveSpec {
    double wavelength_nm = 0.0;
    Polarization polarization = Polarization::extraordinary;
    Role role = Role::pump;

    double omega() const { return units::omega_from_nm(wavelength_nm); }
};

namespace detail {

struct IndexAndSlope {
    double n;
    double dn_dL;  // per um
};

inline IndexAndSlope index_and_slope(const SellmeierModel& m, Polarization pol, double theta_rad, double lambda_nm) {
    m.check(lambda_nm);
    double L = lambda_nm * 1e-3;
    double no2 = m.ordinary.n2(L);
    double no = std::sqrt(no2);
    double dno = m.ordinary.dn2_dL(L) / (2.0 * no);
    if (pol == Polarization::ordinary) return {no, dno};
    double ne2 = m.extraordinary.n2(L);
    double ne = std::sqrt(ne2);
    double dne = m.extraordinary.dn2_dL(L) / (2.0 * ne);
    double c2 = std::cos(theta_rad), s2 = std::sin(theta_rad);
    c2 *= c2;
    s2 *= s2;
    double inv = c2 / no2 + s2 / ne2;
    double n = 1.0 / std::sqrt(inv);
    // d(1/n^2) = -2 n'/n^3
    double dinv = -2.0 * c2 * dno / (no2 * no) - 2.0 * s2 * dne / (ne2 * ne);
    return {n, -0.5 * n * n * n * dinv};
}

}  // namespace detail

inline double refractive_index(const SellmeierModel& m, Polarization pol, double theta_deg, double lambda_nm) {
    return detail::index_and_slope(m, pol, units::deg_to_rad(theta_deg), lambda_nm).n;
}

inline double refractive_index(const CrystalConfig& crystal, const WaveSpec& wave) {
    return refractive_index(crystal.model(), wave.polarization, crystal.theta_deg, wave.wavelength_nm);
}

// k = 2 pi n / lambda in rad/um
inline double wavenumber(const CrystalConfig& crystal, const WaveSpec& wave) {
    return 2.0 * units::pi * refractive_index(crystal, wave) / (wave.wavelength_nm * 1e-3);
}

// k(omega) in rad/mm for a polarization of the crystal
inline double wavenumber_mm(const CrystalConfig& crystal, Polarization pol, double omega) {
    double lambda_nm = units::nm_from_omega(omega);
    return omega * refractive_index(crystal.model(), pol, crystal.theta_deg, lambda_nm) / units::c_mm_per_ps;
}

// k' = (n - lambda dn/dlambda)/c in ps/mm, analytic Sellmeier derivative
inline double inverse_group_velocity(const CrystalConfig& crystal, const WaveSpec& wave) {
    auto r = detail::index_and_slope(crystal.model(), wave.polarization, units::deg_to_rad(crystal.theta_deg),
                                     wave.wavelength_nm);
    return (r.n - wave.wavelength_nm * 1e-3 * r.dn_dL) / units::c_mm_per_ps;
}

inline constexpr double fd_relative_step = 1e-4;

// k' by centered difference of k(omega) with step 1e-4 omega
inline double inverse_group_velocity_fd(const CrystalConfig& crystal, const WaveSpec& wave) {
    double w = wave.omega();
    double h = fd_relative_step * w;
    return (wavenumber_mm(crystal, wave.polarization, w + h) - wavenumber_mm(crystal, wave.polarization, w - h)) / (2.0 * h);
}

}  // namespace spdc
