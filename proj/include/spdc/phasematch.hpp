#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spdc/dispersion.hpp"
#include "spdc/errors.hpp"
#include "spdc/numeric.hpp"
#include "spdc/units.hpp"

namespace spdc {

// counter: idler travels backwards (+k_i in the mismatch); co: all forward.
enum class Geometry { counter_propagating, co_propagating };

inline std::string_view to_string(Geometry g) {
    return g == Geometry::counter_propagating ? "counter" : "co";
}

inline std::optional<Geometry> parse_geometry(std::string_view s) {
    if (s == "counter" || s == "counter_propagating" || s == "+") return Geometry::counter_propagating;
    if (s == "co" || s == "co_propagating" || s == "-") return Geometry::co_propagating;
    return std::nullopt;
}

// pump-signal,idler polarization triple, written like "e-oe"
struct PolarizationScheme {
    Polarization pump = Polarization::extraordinary;
    Polarization signal = Polarization::extraordinary;
    Polarization idler = Polarization::extraordinary;

    std::string str() const {
        auto c = [](Polarization p) { return p == Polarization::ordinary ? 'o' : 'e'; };
        return std::string{c(pump), '-', c(signal), c(idler)};
    }
    static std::optional<PolarizationScheme> parse(std::string_view s) {
        if (s.size() != 4 || s[1] != '-') return std::nullopt;
        auto p = [](char ch) -> std::optional<Polarization> {
            if (ch == 'o') return Polarization::ordinary;
            if (ch == 'e') return Polarization::extraordinary;
            return std::nullopt;
        };
        auto a = p(s[0]), b = p(s[2]), c = p(s[3]);
        if (!a || !b || !c) return std::nullopt;
        return PolarizationScheme{*a, *b, *c};
    }
};

struct InteractionGeometry {
    Geometry geometry = Geometry::co_propagating;
    CrystalConfig crystal;
    WaveSpec pump, signal, idler;
    double k_grating = 0.0;  // rad/mm
    double tau_s = 0.0, tau_i = 0.0, eta = 0.0, delta_tau = 0.0;
    double t_As = 0.0, t_Ai = 0.0, t_Ap = 0.0;
    bool relabeled = false;  // signal and idler swapped to enforce |tau_s| <= |tau_i|

    double sign_i() const { return geometry == Geometry::counter_propagating ? 1.0 : -1.0; }
};

inline double grating_wavenumber(const CrystalConfig& crystal) {
    if (!crystal.poling_period_nm) return 0.0;
    return 2.0 * units::pi * crystal.qpm_order / (*crystal.poling_period_nm * 1e-6);
}

namespace detail {

// D in rad/mm at the central frequencies
inline double closure(const CrystalConfig& crystal, Geometry g, const PolarizationScheme& pol, double pump_nm,
                      double signal_nm, double k_grating) {
    double idler_nm = units::complement_nm(pump_nm, signal_nm);
    double kp = wavenumber_mm(crystal, pol.pump, units::omega_from_nm(pump_nm));
    double ks = wavenumber_mm(crystal, pol.signal, units::omega_from_nm(signal_nm));
    double ki = wavenumber_mm(crystal, pol.idler, units::omega_from_nm(idler_nm));
    double si = g == Geometry::counter_propagating ? 1.0 : -1.0;
    return kp - ks + si * ki - k_grating;
}

inline bool in_window(const SellmeierModel& m, double nm) { return nm >= m.lo_nm && nm <= m.hi_nm; }

}  // namespace detail

// Populate time constants for a fully specified triple; enforces |tau_s| <= |tau_i|
// by swapping signal and idler in co-propagating geometry.
inline InteractionGeometry make_geometry(const CrystalConfig& crystal, Geometry g, WaveSpec pump, WaveSpec signal,
                                         WaveSpec idler) {
    crystal.validate();
    InteractionGeometry geo;
    geo.geometry = g;
    geo.crystal = crystal;
    geo.k_grating = grating_wavenumber(crystal);
    pump.role = Role::pump;
    signal.role = Role::signal;
    idler.role = Role::idler;
    double half = 0.5 * crystal.length_mm;
    double kpp = inverse_group_velocity(crystal, pump);
    double ksp = inverse_group_velocity(crystal, signal);
    double kip = inverse_group_velocity(crystal, idler);
    double tau_s = half * (kpp - ksp);
    double tau_i = half * (kpp + geo.sign_i() * kip);
    if (g == Geometry::co_propagating && std::abs(tau_s) > std::abs(tau_i)) {
        std::swap(signal, idler);
        std::swap(ksp, kip);
        std::swap(tau_s, tau_i);
        signal.role = Role::signal;
        idler.role = Role::idler;
        geo.relabeled = true;
    }
    geo.pump = pump;
    geo.signal = signal;
    geo.idler = idler;
    geo.tau_s = tau_s;
    geo.tau_i = tau_i;
    geo.eta = tau_i != 0.0 ? tau_s / tau_i : 0.0;
    geo.delta_tau = std::abs(tau_i - tau_s);
    geo.t_As = half * (ksp + kpp);
    geo.t_Ai = half * (kip + kpp);
    geo.t_Ap = crystal.length_mm * kpp;
    return geo;
}

inline InteractionGeometry make_geometry(const CrystalConfig& crystal, Geometry g, const PolarizationScheme& pol,
                                         double pump_nm, double signal_nm) {
    double idler_nm = units::complement_nm(pump_nm, signal_nm);
    return make_geometry(crystal, g, WaveSpec{pump_nm, pol.pump, Role::pump}, WaveSpec{signal_nm, pol.signal, Role::signal},
                         WaveSpec{idler_nm, pol.idler, Role::idler});
}

struct SolveOptions {
    double window_lo_factor = 0.4;  // search window in units of the pump wavelength
    double window_hi_factor = 10.0;
    int scan_points = 4000;
    double rtol = 1e-12;
    std::optional<double> near_signal_nm;  // root selection when several exist
};

// All signal wavelengths satisfying the momentum condition inside the search window.
inline std::vector<double> phase_matching_roots(const CrystalConfig& crystal, double pump_nm, Geometry g,
                                                const PolarizationScheme& pol, const SolveOptions& opt = {}) {
    const auto& m = crystal.model();
    m.check(pump_nm);
    if (g == Geometry::counter_propagating && !crystal.poling_period_nm)
        throw NoPhaseMatch("counter-propagating geometry requires a poling period");
    double kg = grating_wavenumber(crystal);
    // the signal is longer than the pump, so the window starts just above lambda_p
    double lo = std::max(opt.window_lo_factor * pump_nm, pump_nm * (1.0 + 1e-9));
    double hi = opt.window_hi_factor * pump_nm;
    auto f = [&](double ls) { return detail::closure(crystal, g, pol, pump_nm, ls, kg); };
    auto valid = [&](double ls) {
        return detail::in_window(m, ls) && detail::in_window(m, units::complement_nm(pump_nm, ls));
    };
    std::vector<double> grid = numeric::logspace(lo, hi, static_cast<std::size_t>(opt.scan_points));
    std::vector<double> roots;
    bool have_prev = false;
    double xp = 0, fp = 0;
    for (double x : grid) {
        if (!valid(x)) {
            have_prev = false;
            continue;
        }
        double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (have_prev && fp != 0.0 && (fx < 0) != (fp < 0)) {
            roots.push_back(numeric::bisect_secant(f, xp, x, opt.rtol));
        }
        xp = x;
        fp = fx;
        have_prev = true;
    }
    // same-polarization co-propagating roots come in (s, i) / (i, s) pairs: keep one
    if (g == Geometry::co_propagating && pol.signal == pol.idler) {
        std::vector<double> kept;
        for (double r : roots) {
            double ri = units::complement_nm(pump_nm, r);
            bool dup = std::any_of(kept.begin(), kept.end(), [&](double k) { return std::abs(k - ri) < 1e-6 * k; });
            if (!dup) kept.push_back(std::min(r, ri));
        }
        roots = kept;
    }
    return roots;
}

inline InteractionGeometry solve_phase_matching(const CrystalConfig& crystal, double pump_nm, Geometry g,
                                                const PolarizationScheme& pol, const SolveOptions& opt = {}) {
    auto roots = phase_matching_roots(crystal, pump_nm, g, pol, opt);
    if (roots.empty()) throw NoPhaseMatch("no sign change of the mismatch in the search window");
    double ls = roots.front();
    if (roots.size() > 1) {
        if (!opt.near_signal_nm) throw AmbiguousMatch(roots);
        ls = *std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
            return std::abs(a - *opt.near_signal_nm) < std::abs(b - *opt.near_signal_nm);
        });
    }
    return make_geometry(crystal, g, pol, pump_nm, ls);
}

// Design mode: poling period closing the momentum condition for a given triple (nm).
inline double design_poling_period(CrystalConfig crystal, Geometry g, const PolarizationScheme& pol, double pump_nm,
                                   double signal_nm) {
    crystal.poling_period_nm.reset();
    double kg = detail::closure(crystal, g, pol, pump_nm, signal_nm, 0.0);
    if (!(kg > 0)) throw NoPhaseMatch("momentum mismatch has the wrong sign for a grating");
    return 2.0 * units::pi * crystal.qpm_order / kg * 1e6;
}

// Design mode: tuning angle (deg) closing the momentum condition in a bulk crystal.
inline double design_tuning_angle(CrystalConfig crystal, Geometry g, const PolarizationScheme& pol, double pump_nm,
                                  double signal_nm, int scan_points = 361) {
    double kg = grating_wavenumber(crystal);
    auto f = [&](double th) {
        crystal.theta_deg = th;
        return detail::closure(crystal, g, pol, pump_nm, signal_nm, kg);
    };
    double prev_t = 0.0, prev_f = f(0.0);
    for (int k = 1; k < scan_points; ++k) {
        double t = 90.0 * k / (scan_points - 1);
        double ft = f(t);
        if (ft == 0.0) return t;
        if ((ft < 0) != (prev_f < 0)) return numeric::bisect_secant(f, prev_t, t, 1e-13);
        prev_t = t;
        prev_f = ft;
    }
    throw NoPhaseMatch("no tuning angle in [0, 90] deg closes the momentum condition");
}

enum class MismatchMode { full_sellmeier, linearized };

// D l_c / 2 at offsets (Omega_s, Omega_i) in rad/ps
inline double phase_mismatch(const InteractionGeometry& g, double omega_s, double omega_i, MismatchMode mode) {
    if (mode == MismatchMode::linearized) return g.tau_s * omega_s + g.tau_i * omega_i;
    const auto& c = g.crystal;
    double kp = wavenumber_mm(c, g.pump.polarization, g.pump.omega() + omega_s + omega_i);
    double ks = wavenumber_mm(c, g.signal.polarization, g.signal.omega() + omega_s);
    double ki = wavenumber_mm(c, g.idler.polarization, g.idler.omega() + omega_i);
    return 0.5 * c.length_mm * (kp - ks + g.sign_i() * ki - g.k_grating);
}

// beta relative to its value at the central frequencies
inline double propagation_phase(const InteractionGeometry& g, double omega_s, double omega_i, MismatchMode mode) {
    if (mode == MismatchMode::linearized) return g.t_As * omega_s + g.t_Ai * omega_i;
    const auto& c = g.crystal;
    auto beta = [&](double ws, double wi) {
        return wavenumber_mm(c, g.signal.polarization, g.signal.omega() + ws) +
               wavenumber_mm(c, g.idler.polarization, g.idler.omega() + wi) +
               wavenumber_mm(c, g.pump.polarization, g.pump.omega() + ws + wi);
    };
    return 0.5 * c.length_mm * (beta(omega_s, omega_i) - beta(0.0, 0.0));
}

}  // namespace spdc
