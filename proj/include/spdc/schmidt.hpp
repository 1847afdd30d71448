#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"
#include "spdc/numeric.hpp"

namespace spdc {

struct SchmidtReport {
    double kappa_exact = std::numeric_limits<double>::quiet_NaN();  // 1 / sum lambda_n^2, singular values
    double kappa_nb = std::numeric_limits<double>::quiet_NaN();     // N^2 / B, Gram matrix
    double kappa_gaussian = std::numeric_limits<double>::quiet_NaN();
    double purity = std::numeric_limits<double>::quiet_NaN();
    double pair_number = 0.0;
    double fluctuation_b = 0.0;
    std::vector<double> mode_spectrum;  // descending, sums to 1, entries below 1e-12 dropped
    double truncation_mass = 0.0;
    std::optional<double> convergence_delta;
};

struct SchmidtOptions {
    double edge_ring = 0.05;
    double edge_limit = 1e-4;
    bool audit = true;
    double report_floor = 1e-12;
};

namespace detail {

// B = ||W W^dagger||_F^2 with W the quadrature-weighted amplitude matrix
inline double fluctuation_gram(const Eigen::MatrixXcd& w) {
    Eigen::MatrixXcd gram;
    if (w.rows() <= w.cols())
        gram.noalias() = w * w.adjoint();
    else
        gram.noalias() = w.adjoint() * w;
    return gram.squaredNorm();
}

}  // namespace detail

// Schmidt number by the Gram route only (cheap objective for searches).
inline double kappa_gram(const AmplitudeGrid& grid) {
    Eigen::MatrixXcd w = grid.values * std::sqrt(grid.cell());
    double n = w.squaredNorm();
    return n * n / detail::fluctuation_gram(w);
}

inline SchmidtReport schmidt_exact(const AmplitudeGrid& grid, const SchmidtOptions& opt = {}) {
    if (grid.domain != Domain::spectral) throw NotSpectral();
    SchmidtReport r;
    r.truncation_mass = edge_ring_mass(grid.values, opt.edge_ring);
    if (opt.audit && r.truncation_mass > opt.edge_limit) throw TruncatedGrid(r.truncation_mass, opt.edge_limit);
    Eigen::MatrixXcd w = grid.values * std::sqrt(grid.cell());
    r.pair_number = w.squaredNorm();
    r.fluctuation_b = detail::fluctuation_gram(w);
    r.kappa_nb = r.pair_number * r.pair_number / r.fluctuation_b;

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(w);
    const auto& sv = svd.singularValues();
    double s2 = 0.0, s4 = 0.0;
    for (long k = 0; k < sv.size(); ++k) {
        double p = sv[k] * sv[k];
        s2 += p;
        s4 += p * p;
    }
    r.kappa_exact = s2 * s2 / s4;
    r.purity = 1.0 / r.kappa_exact;
    for (long k = 0; k < sv.size(); ++k) {
        double lam = sv[k] * sv[k] / s2;
        if (lam < opt.report_floor) break;
        r.mode_spectrum.push_back(lam);
    }
    return r;
}

inline double kappa_from_params(const GaussianJSAParams& c) {
    if (!c.normalizable()) return std::numeric_limits<double>::infinity();
    return std::sqrt(c.c_ss * c.c_ii / c.det());
}

inline double schmidt_gaussian(const InteractionGeometry& g, const PumpPulse& pump, double gamma = gamma_fwhm) {
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    double tp2 = pump.duration_ps * pump.duration_ps;
    double a = 1.0 + 2.0 * gamma * g.tau_s * g.tau_i / tp2;
    return std::sqrt(1.0 + a * a * tp2 / (2.0 * gamma * g.delta_tau * g.delta_tau));
}

inline double kappa_min_gaussian(double eta) { return eta > 0 ? (1.0 + eta) / (1.0 - eta) : 1.0; }

enum class MinimizeMethod { closed_form, numeric_min };

struct OptimalPump {
    double tp_min;
    double kappa_min;
};

struct NumericMinOptions {
    GridSpec grid;
    JsaMode mode = JsaMode::exact_sinc_full;
    double gain = 1.0;
    int prescan_points = 60;
    double span = 30.0;  // window [T/span, T*span] around the closed-form duration
    double rtol = 1e-3;
};

inline double closed_form_tp_min(const InteractionGeometry& g, double gamma) {
    return std::sqrt(2.0 * gamma * std::abs(g.tau_s * g.tau_i));
}

inline OptimalPump optimal_pump_duration(const InteractionGeometry& g, double gamma, MinimizeMethod method,
                                         const NumericMinOptions& opt = {}) {
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    double tc = closed_form_tp_min(g, gamma);
    if (method == MinimizeMethod::closed_form) {
        if (tc == 0.0) return {0.0, 1.0};
        return {tc, schmidt_gaussian(g, PumpPulse{tc, 1.0}, gamma)};
    }
    double center = tc > 1e-9 ? tc : 0.1 * std::abs(g.tau_i);
    auto kappa = [&](double tp) {
        try {
            return kappa_gram(build_jsa(g, PumpPulse{tp, opt.gain}, opt.grid, opt.mode, gamma));
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto xs = numeric::logspace(center / opt.span, center * opt.span, static_cast<std::size_t>(opt.prescan_points));
    std::vector<double> fs(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) fs[k] = kappa(xs[k]);
    auto best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    if (!std::isfinite(fs[best])) throw NoInteriorMinimum("kappa could not be evaluated anywhere in the search window");
    if (best == 0 || best + 1 == xs.size() || !std::isfinite(fs[best - 1]) || !std::isfinite(fs[best + 1]))
        throw NoInteriorMinimum("kappa is monotone over the search window");
    // searching in log T_p makes the absolute tolerance a relative one in T_p
    auto mm = numeric::golden_section([&](double lx) { return kappa(std::exp(lx)); }, std::log(xs[best - 1]),
                                      std::log(xs[best + 1]), opt.rtol);
    double tp = std::exp(mm.x);
    return {tp, mm.fx};
}

enum class TimingRegime { long_pump, ultrashort_pump, intermediate };

struct TimingHeuristics {
    double dt_cond;
    double dt_uncond;
    double mode_estimate;
    TimingRegime regime;
};

inline constexpr double timing_separation = 5.0;

inline TimingHeuristics timing_heuristics(const InteractionGeometry& g, const PumpPulse& pump) {
    double tp = pump.duration_ps;
    TimingHeuristics h{};
    h.dt_uncond = std::sqrt(0.5 * tp * tp + g.tau_s * g.tau_s / 3.0);
    double localized = tp * (1.0 - g.eta);
    if (tp >= timing_separation * std::abs(g.tau_i)) {
        h.regime = TimingRegime::long_pump;
        h.dt_cond = g.delta_tau;
    } else if (tp * timing_separation <= std::abs(g.tau_s)) {
        h.regime = TimingRegime::ultrashort_pump;
        h.dt_cond = localized;
    } else {
        // both mechanisms compete; the sharper one wins
        h.regime = TimingRegime::intermediate;
        h.dt_cond = std::min(g.delta_tau, localized);
    }
    h.mode_estimate = h.dt_uncond / h.dt_cond;
    return h;
}

// kappa at n and 2n samples per axis (Gram route); relative change.
inline double grid_convergence_delta(const InteractionGeometry& g, const PumpPulse& pump, const GridSpec& spec, JsaMode mode,
                                     double gamma = gamma_fwhm) {
    // same windows, twice the samples per axis
    auto plan = plan_grid(g, pump, spec, mode, gamma);
    double k1 = kappa_gram(build_jsa(g, pump, plan, mode, gamma));
    plan.n_s *= 2;
    plan.n_i *= 2;
    double k2 = kappa_gram(build_jsa(g, pump, plan, mode, gamma));
    return std::abs(k2 - k1) / k1;
}

struct AnalyzeOptions {
    GridSpec grid;
    JsaMode mode = JsaMode::exact_sinc_full;
    double gamma = gamma_fwhm;
    SchmidtOptions schmidt;
    bool check_convergence = false;
    double convergence_limit = 5e-3;
};

inline SchmidtReport analyze(const InteractionGeometry& g, const PumpPulse& pump, const AnalyzeOptions& opt = {}) {
    auto grid = build_jsa(g, pump, opt.grid, opt.mode, opt.gamma);
    auto r = schmidt_exact(grid, opt.schmidt);
    r.kappa_gaussian = schmidt_gaussian(g, pump, opt.gamma);
    if (opt.check_convergence) {
        r.convergence_delta = grid_convergence_delta(g, pump, opt.grid, opt.mode, opt.gamma);
        if (*r.convergence_delta > opt.convergence_limit) throw NotConverged(*r.convergence_delta);
    }
    return r;
}

}  // namespace spdc
