#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/numeric.hpp"
#include "spdc/phasematch.hpp"

namespace spdc {

inline constexpr double gamma_fwhm = 0.193;  // sinc(x) ~ exp(-gamma x^2) with equal FWHM
inline constexpr double gamma_moment = 1.0 / 6.0;

// Gaussian pump alpha_p(t) = exp(-t^2 / 2 T_p^2), alpha~_p(Omega) = T_p exp(-T_p^2 Omega^2 / 2).
struct PumpPulse {
    double duration_ps = 1.0;
    double gain = 1.0;

    double alpha(double t) const { return std::exp(-0.5 * t * t / (duration_ps * duration_ps)); }
    double alpha_tilde(double w) const { return duration_ps * std::exp(-0.5 * duration_ps * duration_ps * w * w); }
    void validate() const {
        if (!(duration_ps > 0)) throw Error("InvalidPump", "pump duration must be positive");
        if (!(gain > 0)) throw Error("InvalidPump", "gain must be positive");
    }
};

enum class JsaMode { exact_sinc_full, exact_sinc_linearized, gaussian };

inline std::string_view to_string(JsaMode m) {
    switch (m) {
        case JsaMode::exact_sinc_full: return "full";
        case JsaMode::exact_sinc_linearized: return "linearized";
        case JsaMode::gaussian: return "gaussian";
    }
    return "?";
}

inline std::optional<JsaMode> parse_jsa_mode(std::string_view s) {
    if (s == "full" || s == "exact_sinc_full") return JsaMode::exact_sinc_full;
    if (s == "linearized" || s == "exact_sinc_linearized") return JsaMode::exact_sinc_linearized;
    if (s == "gaussian") return JsaMode::gaussian;
    return std::nullopt;
}

struct GaussianJSAParams {
    double c_ss, c_ii, c_si;  // ps^2
    double gamma;
    double t_As, t_Ai;
    double prefactor;  // g T_p / sqrt(2 pi)

    double det() const { return c_ss * c_ii - c_si * c_si; }
    bool normalizable() const { return c_ss > 0 && c_ii > 0 && det() > 0; }
    double exponent(double ws, double wi) const { return c_ss * ws * ws + c_ii * wi * wi + 2.0 * c_si * ws * wi; }
};

inline GaussianJSAParams gaussian_params(const InteractionGeometry& g, const PumpPulse& pump, double gamma = gamma_fwhm) {
    double h = 0.5 * pump.duration_ps * pump.duration_ps;
    return {h + gamma * g.tau_s * g.tau_s,
            h + gamma * g.tau_i * g.tau_i,
            h + gamma * g.tau_s * g.tau_i,
            gamma,
            g.t_As,
            g.t_Ai,
            pump.gain * pump.duration_ps / std::sqrt(2.0 * units::pi)};
}

struct GridSpec {
    long n = 0;                             // samples per axis; 0 picks the smallest adequate power of two
    std::optional<double> window_s;         // half-width override, rad/ps
    std::optional<double> window_i;
    double sinc_reach = 160.0 * units::pi;  // sinc argument covered beyond the pump-limited ridge; sinc^2 ring mass ~ 0.035 / reach
    double pump_reach = 4.3;                // |alpha~|^2 covered down to exp(-4.3^2)
    double gaussian_reach = 6.5;            // standard deviations of |psi|^2 in gaussian mode
    double time_reach = 3.5;                // temporal half-extent in units of T_p
    long min_auto_n = 64;
    long max_auto_n = 4096;                 // auto plans needing more samples per axis are refused
};

struct GridPlan {
    double window_s, window_i;   // spectral half-widths, rad/ps
    double extent_s, extent_i;   // temporal half-extents to resolve, ps
    long required_n_s, required_n_i;
    long n_s, n_i;
};

inline double minimum_window(const InteractionGeometry& g, const PumpPulse& pump) {
    return std::max(6.0 / pump.duration_ps, 8.0 * units::pi / g.delta_tau);
}

inline constexpr double tau_epsilon = 1e-6;  // ps

inline GridPlan plan_grid(const InteractionGeometry& g, const PumpPulse& pump, const GridSpec& spec, JsaMode mode,
                          double gamma = gamma_fwhm) {
    pump.validate();
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    double ws, wi, ts, ti;
    double Tp = pump.duration_ps;
    if (mode == JsaMode::gaussian) {
        auto c = gaussian_params(g, pump, gamma);
        double d4 = 4.0 * c.det();
        ws = spec.gaussian_reach * std::sqrt(c.c_ii / d4);
        wi = spec.gaussian_reach * std::sqrt(c.c_ss / d4);
        ts = spec.gaussian_reach * std::sqrt(c.c_ss);
        ti = spec.gaussian_reach * std::sqrt(c.c_ii);
    } else {
        double u = spec.pump_reach / Tp;
        ws = (std::abs(g.tau_i) * u + spec.sinc_reach) / g.delta_tau;
        wi = (std::abs(g.tau_s) * u + spec.sinc_reach) / g.delta_tau;
        ts = spec.time_reach * Tp + std::abs(g.tau_s);
        ti = spec.time_reach * Tp + std::abs(g.tau_i);
    }
    double w0 = minimum_window(g, pump);
    ws = std::max(ws, w0);
    wi = std::max(wi, w0);
    if (spec.window_s) {
        if (*spec.window_s < w0) throw GridTooNarrow("spectral window (signal)", w0, *spec.window_s);
        ws = *spec.window_s;
    }
    if (spec.window_i) {
        if (*spec.window_i < w0) throw GridTooNarrow("spectral window (idler)", w0, *spec.window_i);
        wi = *spec.window_i;
    }
    GridPlan p{ws, wi, ts, ti, 0, 0, 0, 0};
    // step <= pi / extent keeps the dual temporal window wider than +-extent
    p.required_n_s = numeric::next_pow2(2.0 * ws * ts / units::pi);
    p.required_n_i = numeric::next_pow2(2.0 * wi * ti / units::pi);
    if (spec.n > 0) {
        if (!numeric::is_pow2(spec.n)) throw NonPowerOfTwo(spec.n);
        if (spec.n < p.required_n_s) throw GridTooNarrow("temporal window (signal), ps", 2.0 * ts, units::pi * spec.n / ws);
        if (spec.n < p.required_n_i) throw GridTooNarrow("temporal window (idler), ps", 2.0 * ti, units::pi * spec.n / wi);
        p.n_s = p.n_i = spec.n;
    } else {
        long need = std::max(p.required_n_s, p.required_n_i);
        if (need > spec.max_auto_n)
            throw GridTooNarrow("samples per axis (auto cap)", static_cast<double>(need), static_cast<double>(spec.max_auto_n));
        p.n_s = std::max(spec.min_auto_n, p.required_n_s);
        p.n_i = std::max(spec.min_auto_n, p.required_n_i);
    }
    return p;
}

namespace detail {

inline AmplitudeGrid empty_spectral_grid(const GridPlan& p, const InteractionGeometry& g) {
    AmplitudeGrid grid;
    grid.domain = Domain::spectral;
    grid.axis_s = Axis{2.0 * p.window_s / static_cast<double>(p.n_s), p.n_s};
    grid.axis_i = Axis{2.0 * p.window_i / static_cast<double>(p.n_i), p.n_i};
    grid.values.resize(p.n_s, p.n_i);
    grid.ref_time_s = g.t_As;
    grid.ref_time_i = g.t_Ai;
    return grid;
}

}  // namespace detail

// psi = (g / sqrt(2 pi)) alpha~(Os + Oi) sinc(D l_c / 2) exp(i beta); gaussian mode
// replaces the sinc by exp(-gamma (tau_s Os + tau_i Oi)^2) with linear beta.
inline AmplitudeGrid build_jsa(const InteractionGeometry& g, const PumpPulse& pump, const GridPlan& plan, JsaMode mode,
                               double gamma = gamma_fwhm) {
    AmplitudeGrid grid = detail::empty_spectral_grid(plan, g);
    const long ns = plan.n_s, ni = plan.n_i;
    const double pre = pump.gain / std::sqrt(2.0 * units::pi);
    std::vector<double> os(ns), oi(ni);
    for (long a = 0; a < ns; ++a) os[a] = grid.axis_s.value(a);
    for (long b = 0; b < ni; ++b) oi[b] = grid.axis_i.value(b);

    if (mode == JsaMode::gaussian) {
        auto c = gaussian_params(g, pump, gamma);
        for (long b = 0; b < ni; ++b)
            for (long a = 0; a < ns; ++a) {
                double ws = os[a], wi = oi[b];
                grid.values(a, b) = c.prefactor * std::exp(-c.exponent(ws, wi)) * std::polar(1.0, g.t_As * ws + g.t_Ai * wi);
            }
        return grid;
    }
    if (mode == JsaMode::exact_sinc_linearized) {
        for (long b = 0; b < ni; ++b)
            for (long a = 0; a < ns; ++a) {
                double ws = os[a], wi = oi[b];
                double d = g.tau_s * ws + g.tau_i * wi;
                grid.values(a, b) =
                    pre * pump.alpha_tilde(ws + wi) * numeric::sinc(d) * std::polar(1.0, g.t_As * ws + g.t_Ai * wi);
            }
        return grid;
    }
    const auto& cr = g.crystal;
    const double half = 0.5 * cr.length_mm;
    std::vector<double> ks(ns), ki(ni);
    for (long a = 0; a < ns; ++a) ks[a] = wavenumber_mm(cr, g.signal.polarization, g.signal.omega() + os[a]);
    for (long b = 0; b < ni; ++b) ki[b] = wavenumber_mm(cr, g.idler.polarization, g.idler.omega() + oi[b]);
    const double kp0 = wavenumber_mm(cr, g.pump.polarization, g.pump.omega());
    const double ks0 = wavenumber_mm(cr, g.signal.polarization, g.signal.omega());
    const double ki0 = wavenumber_mm(cr, g.idler.polarization, g.idler.omega());
    const double beta0 = kp0 + ks0 + ki0;
    for (long b = 0; b < ni; ++b)
        for (long a = 0; a < ns; ++a) {
            double ws = os[a], wi = oi[b];
            double kp = wavenumber_mm(cr, g.pump.polarization, g.pump.omega() + ws + wi);
            double d = half * (kp - ks[a] + g.sign_i() * ki[b] - g.k_grating);
            double beta = half * ((kp + ks[a] + ki[b]) - beta0);
            grid.values(a, b) = pre * pump.alpha_tilde(ws + wi) * numeric::sinc(d) * std::polar(1.0, beta);
        }
    return grid;
}

inline AmplitudeGrid build_jsa(const InteractionGeometry& g, const PumpPulse& pump, const GridSpec& spec, JsaMode mode,
                               double gamma = gamma_fwhm) {
    return build_jsa(g, pump, plan_grid(g, pump, spec, mode, gamma), mode, gamma);
}

// Analytic psi for a single node, same convention as build_jsa.
inline cplx jsa_value(const InteractionGeometry& g, const PumpPulse& pump, double ws, double wi, JsaMode mode,
                      double gamma = gamma_fwhm) {
    if (mode == JsaMode::gaussian) {
        auto c = gaussian_params(g, pump, gamma);
        return c.prefactor * std::exp(-c.exponent(ws, wi)) * std::polar(1.0, g.t_As * ws + g.t_Ai * wi);
    }
    auto m = mode == JsaMode::exact_sinc_full ? MismatchMode::full_sellmeier : MismatchMode::linearized;
    return pump.gain / std::sqrt(2.0 * units::pi) * pump.alpha_tilde(ws + wi) * numeric::sinc(phase_mismatch(g, ws, wi, m)) *
           std::polar(1.0, propagation_phase(g, ws, wi, m));
}

// Fraction of sum |v|^2 lying in the outermost `ring` fraction of either axis.
inline double edge_ring_mass(const Eigen::MatrixXcd& v, double ring = 0.05) {
    const long ns = v.rows(), ni = v.cols();
    long rs = std::max<long>(1, static_cast<long>(std::ceil(ring * ns)));
    long ri = std::max<long>(1, static_cast<long>(std::ceil(ring * ni)));
    double total = 0.0, edge = 0.0;
    for (long b = 0; b < ni; ++b)
        for (long a = 0; a < ns; ++a) {
            double p = std::norm(v(a, b));
            total += p;
            if (a < rs || a >= ns - rs || b < ri || b >= ni - ri) edge += p;
        }
    return total > 0 ? edge / total : 0.0;
}

}  // namespace spdc
