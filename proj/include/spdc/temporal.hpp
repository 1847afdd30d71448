#pragma once

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"
#include "spdc/numeric.hpp"
#include "spdc/series.hpp"

namespace spdc {

namespace detail {

// y_a = sum_j exp(sign * 2 pi i (j - N/2)(a - N/2) / N) x_j, in place, N even
inline void centered_dft(std::vector<cplx>& x, Eigen::FFT<double>& fft, std::vector<cplx>& tmp, bool inverse) {
    const std::size_t n = x.size(), h = n / 2;
    std::rotate(x.begin(), x.begin() + static_cast<long>(h), x.end());
    if (inverse)
        for (auto& v : x) v = std::conj(v);
    fft.fwd(tmp, x);
    if (inverse)
        for (auto& v : tmp) v = std::conj(v);
    std::rotate(tmp.begin(), tmp.begin() + static_cast<long>(h), tmp.end());
    x.swap(tmp);
}

inline void centered_dft_2d(Eigen::MatrixXcd& m, bool inverse) {
    Eigen::FFT<double> fft;
    std::vector<cplx> buf, tmp;
    buf.resize(static_cast<std::size_t>(m.rows()));
    for (long b = 0; b < m.cols(); ++b) {
        for (long a = 0; a < m.rows(); ++a) buf[a] = m(a, b);
        centered_dft(buf, fft, tmp, inverse);
        for (long a = 0; a < m.rows(); ++a) m(a, b) = buf[a];
    }
    buf.resize(static_cast<std::size_t>(m.cols()));
    for (long a = 0; a < m.rows(); ++a) {
        for (long b = 0; b < m.cols(); ++b) buf[b] = m(a, b);
        centered_dft(buf, fft, tmp, inverse);
        for (long b = 0; b < m.cols(); ++b) m(a, b) = buf[b];
    }
}

inline void require_pow2(const AmplitudeGrid& g) {
    if (!numeric::is_pow2(g.rows())) throw NonPowerOfTwo(g.rows());
    if (!numeric::is_pow2(g.cols())) throw NonPowerOfTwo(g.cols());
}

}  // namespace detail

// phi(t_s, t_i) = int dOs dOi / (2 pi) exp(-i (Os t_s + Oi t_i)) psi(Os, Oi), with the
// linear phase of psi removed first so the output lives on barred times.
inline AmplitudeGrid to_temporal(const AmplitudeGrid& spectral) {
    if (spectral.domain != Domain::spectral) throw NotSpectral();
    detail::require_pow2(spectral);
    AmplitudeGrid out;
    out.domain = Domain::temporal;
    out.axis_s = spectral.axis_s.dual();
    out.axis_i = spectral.axis_i.dual();
    out.ref_time_s = spectral.ref_time_s;
    out.ref_time_i = spectral.ref_time_i;
    out.values = spectral.values;
    for (long b = 0; b < out.values.cols(); ++b) {
        double wi = spectral.axis_i.value(b);
        for (long a = 0; a < out.values.rows(); ++a)
            out.values(a, b) *= std::polar(1.0, -(spectral.ref_time_s * spectral.axis_s.value(a) + spectral.ref_time_i * wi));
    }
    detail::centered_dft_2d(out.values, false);
    out.values *= spectral.cell() / (2.0 * units::pi);
    return out;
}

// Inverse of to_temporal, restoring the linear phase.
inline AmplitudeGrid to_spectral(const AmplitudeGrid& temporal) {
    if (temporal.domain != Domain::temporal) throw NotTemporal();
    detail::require_pow2(temporal);
    AmplitudeGrid out;
    out.domain = Domain::spectral;
    out.axis_s = temporal.axis_s.dual();
    out.axis_i = temporal.axis_i.dual();
    out.ref_time_s = temporal.ref_time_s;
    out.ref_time_i = temporal.ref_time_i;
    out.values = temporal.values;
    detail::centered_dft_2d(out.values, true);
    out.values *= temporal.cell() / (2.0 * units::pi);
    for (long b = 0; b < out.values.cols(); ++b) {
        double wi = out.axis_i.value(b);
        for (long a = 0; a < out.values.rows(); ++a)
            out.values(a, b) *= std::polar(1.0, temporal.ref_time_s * out.axis_s.value(a) + temporal.ref_time_i * wi);
    }
    return out;
}

// Rect(x / w): 1 inside, 1/2 on the edge (the Fourier-consistent value), 0 outside.
inline double rect(double x, double w) {
    double ax = std::abs(x);
    const double tol = 1e-9 * w;
    if (ax < w - tol) return 1.0;
    if (ax <= w + tol) return 0.5;
    return 0.0;
}

// Closed-form linearized phi on barred times.
inline cplx analytic_phi(const InteractionGeometry& g, const PumpPulse& pump, double ts, double ti) {
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    double p = (ts - g.eta * ti) / (1.0 - g.eta);
    return pump.gain / (2.0 * g.delta_tau) * pump.alpha(p) * rect(ts - ti, g.delta_tau);
}

enum class PumpRegime { long_pump, ultrashort_pump, intermediate };

inline std::string_view to_string(PumpRegime r) {
    switch (r) {
        case PumpRegime::long_pump: return "long_pump";
        case PumpRegime::ultrashort_pump: return "ultrashort_pump";
        case PumpRegime::intermediate: return "intermediate";
    }
    return "?";
}

inline constexpr double regime_separation = 5.0;  // factor standing in for ">>"

// Asymptotic forms of phi. regime_holds() reports whether the ordering of
// T_p against tau_s, tau_i that the form assumes is actually satisfied.
class AsymptoticPhi {
public:
    AsymptoticPhi(const InteractionGeometry& g, const PumpPulse& pump, PumpRegime regime)
        : g_(g), pump_(pump), regime_(regime) {
        if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
        double tp = pump.duration_ps, as = std::abs(g.tau_s), ai = std::abs(g.tau_i);
        switch (regime) {
            case PumpRegime::long_pump: holds_ = tp > regime_separation * ai; break;
            case PumpRegime::ultrashort_pump: holds_ = tp * regime_separation < as; break;
            case PumpRegime::intermediate:
                if (as * regime_separation * regime_separation > ai)
                    throw RegimeNotApplicable("|tau_i| >> T_p >> |tau_s| cannot hold when |eta| is not small");
                holds_ = tp < ai / regime_separation && tp > regime_separation * as;
                break;
        }
    }

    bool regime_holds() const { return holds_; }
    PumpRegime regime() const { return regime_; }

    cplx operator()(double ts, double ti) const {
        double a = pump_.gain / (2.0 * g_.delta_tau);
        switch (regime_) {
            case PumpRegime::long_pump: return a * pump_.alpha(ts) * rect(ts - ti, g_.delta_tau);
            case PumpRegime::ultrashort_pump:
                return a * pump_.alpha((ts - g_.eta * ti) / (1.0 - g_.eta)) * rect(ts, std::abs(g_.tau_s));
            case PumpRegime::intermediate: return a * pump_.alpha(ts) * rect(ti, g_.delta_tau);
        }
        return 0.0;
    }

private:
    InteractionGeometry g_;
    PumpPulse pump_;
    PumpRegime regime_;
    bool holds_ = false;
};

struct AnalyticGridSpec {
    double time_reach = 6.0;       // pump support covered, units of T_p
    double step_fraction = 0.5;    // step <= step_fraction * T_p
    long min_steps = 1;            // at least this many steps across delta_tau
    long max_samples = 1L << 22;   // guard on n_s * n_i
};

// Sample analytic phi on equal steps h = delta_tau / M so that the Rect edges fall
// on lattice diagonals; counts are powers of two covering the support.
inline AmplitudeGrid build_analytic_temporal(const InteractionGeometry& g, const PumpPulse& pump,
                                             const AnalyticGridSpec& spec = {}) {
    pump.validate();
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    double tp = pump.duration_ps;
    long m = std::max(spec.min_steps, static_cast<long>(std::ceil(g.delta_tau / (spec.step_fraction * tp))));
    double h = g.delta_tau / static_cast<double>(m);
    double es = spec.time_reach * tp + std::abs(g.tau_s);
    double ei = spec.time_reach * tp + std::abs(g.tau_i);
    long ns = numeric::next_pow2(2.0 * es / h + 2.0), ni = numeric::next_pow2(2.0 * ei / h + 2.0);
    if (ns * ni > spec.max_samples)
        throw GridTooNarrow("analytic temporal grid samples", static_cast<double>(ns) * static_cast<double>(ni),
                            static_cast<double>(spec.max_samples));
    AmplitudeGrid out;
    out.domain = Domain::temporal;
    out.axis_s = Axis{h, ns};
    out.axis_i = Axis{h, ni};
    out.ref_time_s = g.t_As;
    out.ref_time_i = g.t_Ai;
    out.values.resize(ns, ni);
    for (long b = 0; b < ni; ++b)
        for (long a = 0; a < ns; ++a) out.values(a, b) = analytic_phi(g, pump, out.axis_s.value(a), out.axis_i.value(b));
    return out;
}

// Lattice quadrature of int int |phi|^2 for the closed-form phi, summed over the
// Rect strip only (no grid storage; handles pump durations far beyond delta_tau).
inline double analytic_pair_number_quadrature(const InteractionGeometry& g, const PumpPulse& pump,
                                              const AnalyticGridSpec& spec = {}) {
    pump.validate();
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    double tp = pump.duration_ps;
    long m = std::max(1L, static_cast<long>(std::ceil(g.delta_tau / (spec.step_fraction * tp))));
    double h = g.delta_tau / static_cast<double>(m);
    double ei = spec.time_reach * tp + std::abs(g.tau_i);
    long bmax = static_cast<long>(std::ceil(ei / h)) + m + 1;
    // trapezoid across the strip: the Rect edges carry half weight in |phi|^2
    double sum = 0.0;
    for (long b = -bmax; b <= bmax; ++b) {
        double ti = static_cast<double>(b) * h;
        for (long d = -m; d <= m; ++d) {
            double ts = ti + static_cast<double>(d) * h;
            double a = pump.alpha((ts - g.eta * ti) / (1.0 - g.eta));
            sum += (d == -m || d == m ? 0.5 : 1.0) * a * a;
        }
    }
    double amp = pump.gain / (2.0 * g.delta_tau);
    return amp * amp * sum * h * h;
}

// G2bar(dt) = int dt_s |phi(t_s, t_s + dt)|^2 by nearest-neighbour binning of t_i - t_s
// with bin width equal to the finer temporal step.
inline Series coincidence_marginal(const AmplitudeGrid& t) {
    if (t.domain != Domain::temporal) throw NotTemporal();
    Series out;
    out.step = std::min(t.axis_s.step, t.axis_i.step);
    double lo = t.axis_i.front() - t.axis_s.back(), hi = t.axis_i.back() - t.axis_s.front();
    long kmin = static_cast<long>(std::floor(lo / out.step + 0.5)), kmax = static_cast<long>(std::floor(hi / out.step + 0.5));
    out.x.resize(static_cast<std::size_t>(kmax - kmin + 1));
    out.y.assign(out.x.size(), 0.0);
    for (long k = kmin; k <= kmax; ++k) out.x[static_cast<std::size_t>(k - kmin)] = static_cast<double>(k) * out.step;
    const double w = t.cell() / out.step;
    for (long b = 0; b < t.cols(); ++b)
        for (long a = 0; a < t.rows(); ++a) {
            double dt = t.axis_i.value(b) - t.axis_s.value(a);
            long k = static_cast<long>(std::floor(dt / out.step + 0.5));
            out.y[static_cast<std::size_t>(k - kmin)] += std::norm(t.values(a, b)) * w;
        }
    return out;
}

inline Eigen::MatrixXd joint_temporal_probability(const AmplitudeGrid& t) { return t.values.cwiseAbs2(); }

}  // namespace spdc
