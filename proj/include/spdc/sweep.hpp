#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/heralded.hpp"
#include "spdc/jsa.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/temporal.hpp"

namespace spdc {

// Runs fn(k) for k in [0, n) on up to `workers` threads. fn writes its own slot.
template <class F>
void parallel_for(std::size_t n, int workers, F&& fn) {
    std::size_t w = static_cast<std::size_t>(std::max(1, workers));
    w = std::min(w, n);
    if (w <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(w);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t k = next++; k < n; k = next++) fn(k);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct PumpSweepRow {
    double tp = nan_value;
    double kappa_gaussian = nan_value;
    double kappa_exact = nan_value;
    double pair_number = nan_value;
    std::string error;  // empty on success
};

struct PumpSweepOptions {
    GridSpec grid;
    JsaMode mode = JsaMode::exact_sinc_full;
    double gamma = gamma_fwhm;
    double gain = 1.0;
    bool exact = true;
    std::size_t exact_subsample = 15;  // 0 computes exact kappa at every point
    int workers = 1;
};

namespace detail {

template <class F>
std::string capture_error(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    } catch (const std::exception&) {
        return "InternalError";
    }
    return {};
}

inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m) {
    std::vector<std::size_t> idx;
    if (m == 0 || m >= n) {
        for (std::size_t k = 0; k < n; ++k) idx.push_back(k);
        return idx;
    }
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t k = static_cast<std::size_t>(std::llround(static_cast<double>(j) * static_cast<double>(n - 1) /
                                                              static_cast<double>(m - 1)));
        if (idx.empty() || idx.back() != k) idx.push_back(k);
    }
    return idx;
}

}  // namespace detail

// Gaussian kappa and pair number at every duration; exact kappa (fresh grid per point)
// at a subsample, then at every point between the subsample neighbours of its minimum.
inline std::vector<PumpSweepRow> sweep_pump_duration(const InteractionGeometry& g, const std::vector<double>& tps,
                                                     const PumpSweepOptions& opt = {}) {
    std::vector<PumpSweepRow> rows(tps.size());
    for (std::size_t k = 0; k < tps.size(); ++k) {
        auto& r = rows[k];
        r.tp = tps[k];
        r.error = detail::capture_error([&] {
            if (!(tps[k] >= 1e-3 && tps[k] <= 1e3)) throw Error("OutOfRange", "pump duration outside [1e-3, 1e3] ps");
            PumpPulse p{tps[k], opt.gain};
            r.kappa_gaussian = schmidt_gaussian(g, p, opt.gamma);
            r.pair_number = pair_number(g, p, PairRegime::general_linearized);
        });
    }
    if (!opt.exact) return rows;
    auto run = [&](const std::vector<std::size_t>& idx) {
        parallel_for(idx.size(), opt.workers, [&](std::size_t j) {
            auto& r = rows[idx[j]];
            if (!r.error.empty()) return;
            r.error = detail::capture_error([&] {
                auto grid = build_jsa(g, PumpPulse{r.tp, opt.gain}, opt.grid, opt.mode, opt.gamma);
                r.kappa_exact = schmidt_exact(grid).kappa_exact;
            });
        });
    };
    auto first = detail::subsample_indices(tps.size(), opt.exact_subsample);
    run(first);
    if (first.size() < tps.size()) {
        std::size_t best = first.size();
        for (std::size_t j = 0; j < first.size(); ++j)
            if (std::isfinite(rows[first[j]].kappa_exact) &&
                (best == first.size() || rows[first[j]].kappa_exact < rows[first[best]].kappa_exact))
                best = j;
        if (best < first.size()) {
            std::size_t lo = best > 0 ? first[best - 1] : first[best];
            std::size_t hi = best + 1 < first.size() ? first[best + 1] : first[best];
            std::vector<std::size_t> extra;
            for (std::size_t k = lo; k <= hi; ++k)
                if (!std::binary_search(first.begin(), first.end(), k)) extra.push_back(k);
            run(extra);
        }
    }
    return rows;
}

enum class DesignKnob { poling_period, tuning_angle };

struct SignalSweepSetup {
    CrystalConfig crystal;
    Geometry geometry = Geometry::co_propagating;
    PolarizationScheme polarization;
    double pump_nm = 0.0;
    DesignKnob knob = DesignKnob::tuning_angle;
};

struct SignalSweepRow {
    double lambda_s_requested = nan_value;
    double lambda_s = nan_value;  // after the |tau_s| <= |tau_i| labeling
    double lambda_i = nan_value;
    double tau_s = nan_value, tau_i = nan_value, eta = nan_value;
    double kappa_min_gaussian = nan_value;
    double tp_min = nan_value;
    double design_value = nan_value;  // poling period (nm) or tuning angle (deg)
    bool relabeled = false;
    std::string error;
};

inline std::vector<SignalSweepRow> sweep_signal_wavelength(const SignalSweepSetup& s, const std::vector<double>& lambdas,
                                                           double gamma = gamma_fwhm, int workers = 1) {
    std::vector<SignalSweepRow> rows(lambdas.size());
    parallel_for(lambdas.size(), workers, [&](std::size_t k) {
        auto& r = rows[k];
        r.lambda_s_requested = lambdas[k];
        r.error = detail::capture_error([&] {
            CrystalConfig c = s.crystal;
            if (s.knob == DesignKnob::poling_period) {
                r.design_value = design_poling_period(c, s.geometry, s.polarization, s.pump_nm, lambdas[k]);
                c.poling_period_nm = r.design_value;
            } else {
                r.design_value = design_tuning_angle(c, s.geometry, s.polarization, s.pump_nm, lambdas[k]);
                c.theta_deg = r.design_value;
            }
            auto g = make_geometry(c, s.geometry, s.polarization, s.pump_nm, lambdas[k]);
            r.lambda_s = g.signal.wavelength_nm;
            r.lambda_i = g.idler.wavelength_nm;
            r.tau_s = g.tau_s;
            r.tau_i = g.tau_i;
            r.eta = g.eta;
            r.relabeled = g.relabeled;
            r.tp_min = closed_form_tp_min(g, gamma);
            r.kappa_min_gaussian = kappa_min_gaussian(g.eta);
        });
    });
    return rows;
}

// Conic c_ss x^2 + c_ii y^2 + 2 c_si x y = 1: principal semi-axes and orientation.
struct Ellipse {
    double c_ss, c_ii, c_si;
    double semi_major, semi_minor;
    double angle_rad;  // major axis against the signal axis

    bool axis_aligned(double tol = 1e-12) const { return std::abs(c_si) <= tol * std::max(c_ss, c_ii); }
    bool circle(double tol = 1e-12) const { return axis_aligned(tol) && std::abs(c_ss - c_ii) <= tol * std::max(c_ss, c_ii); }
};

inline Ellipse conic_ellipse(double c_ss, double c_ii, double c_si) {
    double tr = 0.5 * (c_ss + c_ii), df = 0.5 * (c_ss - c_ii);
    double rad = std::sqrt(df * df + c_si * c_si);
    double l_small = tr - rad, l_large = tr + rad;
    Ellipse e{c_ss, c_ii, c_si, 1.0 / std::sqrt(l_small), 1.0 / std::sqrt(l_large), 0.0};
    // eigenvector of the smaller eigenvalue gives the major axis
    e.angle_rad = 0.5 * std::atan2(-2.0 * c_si, c_ii - c_ss);
    return e;
}

struct Panel {
    double tp = nan_value;
    AmplitudeGrid spectral;
    AmplitudeGrid temporal;
    GaussianJSAParams gaussian{};
    Ellipse ellipse{};
    double kappa_exact = nan_value;
    double kappa_gaussian = nan_value;
    std::string error;
};

inline std::vector<Panel> panel_study(const InteractionGeometry& g, const std::vector<double>& tps,
                                      const PumpSweepOptions& opt = {}) {
    std::vector<Panel> panels(tps.size());
    parallel_for(tps.size(), opt.workers, [&](std::size_t k) {
        auto& p = panels[k];
        p.tp = tps[k];
        p.error = detail::capture_error([&] {
            PumpPulse pump{tps[k], opt.gain};
            p.gaussian = gaussian_params(g, pump, opt.gamma);
            p.ellipse = conic_ellipse(p.gaussian.c_ss, p.gaussian.c_ii, p.gaussian.c_si);
            p.kappa_gaussian = schmidt_gaussian(g, pump, opt.gamma);
            p.spectral = build_jsa(g, pump, opt.grid, opt.mode, opt.gamma);
            p.temporal = to_temporal(p.spectral);
            p.kappa_exact = schmidt_exact(p.spectral).kappa_exact;
        });
    });
    return panels;
}

}  // namespace spdc
