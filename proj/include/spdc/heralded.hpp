#pragma once

#include <cmath>
#include <string_view>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"
#include "spdc/series.hpp"

namespace spdc {

enum class Photon { signal, idler };

// G1_s(x, x') = sum_i conj(f(x, i)) f(x', i) d_i on whichever domain the grid holds;
// the idler mirror sums over the signal axis.
inline Eigen::MatrixXcd g1_coherence(const AmplitudeGrid& grid, Photon which) {
    if (which == Photon::signal) {
        Eigen::MatrixXcd g;
        g.noalias() = grid.values.conjugate() * grid.values.transpose();
        return g * grid.axis_i.step;
    }
    Eigen::MatrixXcd g;
    g.noalias() = grid.values.adjoint() * grid.values;
    return g * grid.axis_s.step;
}

// One row G1(x_k, .) without forming the full matrix.
inline Eigen::VectorXcd g1_row(const AmplitudeGrid& grid, Photon which, long k) {
    if (which == Photon::signal)
        return (grid.values * grid.values.row(k).adjoint()) * grid.axis_i.step;
    return (grid.values.transpose() * grid.values.col(k).conjugate()) * grid.axis_s.step;
}

namespace detail {

inline Series diagonal_marginal(const AmplitudeGrid& grid, Photon which) {
    const Axis& ax = which == Photon::signal ? grid.axis_s : grid.axis_i;
    Series s;
    s.step = ax.step;
    s.x.resize(static_cast<std::size_t>(ax.count));
    s.y.assign(s.x.size(), 0.0);
    for (long k = 0; k < ax.count; ++k) s.x[static_cast<std::size_t>(k)] = ax.value(k);
    if (which == Photon::signal) {
        Eigen::VectorXd m = grid.values.cwiseAbs2().rowwise().sum() * grid.axis_i.step;
        for (long k = 0; k < ax.count; ++k) s.y[static_cast<std::size_t>(k)] = m[k];
    } else {
        Eigen::VectorXd m = grid.values.cwiseAbs2().colwise().sum().transpose() * grid.axis_s.step;
        for (long k = 0; k < ax.count; ++k) s.y[static_cast<std::size_t>(k)] = m[k];
    }
    return s;
}

}  // namespace detail

// I_j(t) = G1_j(t, t) on barred times
inline Series intensity_profile(const AmplitudeGrid& temporal, Photon which) {
    if (temporal.domain != Domain::temporal) throw NotTemporal();
    return detail::diagonal_marginal(temporal, which);
}

// S_j(Omega) = sum over the partner axis of |psi|^2 dOmega
inline Series spectrum(const AmplitudeGrid& spectral, Photon which) {
    if (spectral.domain != Domain::spectral) throw NotSpectral();
    return detail::diagonal_marginal(spectral, which);
}

enum class PairRegime { general_linearized, long_pump, symmetric_min, asymmetric_min };

inline std::string_view to_string(PairRegime r) {
    switch (r) {
        case PairRegime::general_linearized: return "general_linearized";
        case PairRegime::long_pump: return "long_pump";
        case PairRegime::symmetric_min: return "symmetric_min";
        case PairRegime::asymmetric_min: return "asymmetric_min";
    }
    return "?";
}

// Mean number of pairs per pulse. The symmetric and asymmetric forms are the general
// one specialised to tau_s = -tau_i and delta_tau = (1 - eta)|tau_i|; evaluated at the
// optimal duration the symmetric form gives g^2 sqrt(2 pi gamma) / 4.
inline double pair_number(const InteractionGeometry& g, const PumpPulse& pump, PairRegime regime,
                          double gamma = gamma_fwhm) {
    if (g.delta_tau < tau_epsilon) throw DegenerateVelocities(g.delta_tau);
    const double g2 = pump.gain * pump.gain, tp = pump.duration_ps, sp = std::sqrt(units::pi);
    switch (regime) {
        case PairRegime::general_linearized: return g2 * sp * tp / (2.0 * g.delta_tau);
        case PairRegime::long_pump: return 0.5 * g2 * tp / (std::sqrt(2.0 * gamma) * g.delta_tau);
        case PairRegime::symmetric_min: return 0.25 * g2 * sp * tp / std::abs(g.tau_i);
        case PairRegime::asymmetric_min: return 0.5 * g2 * sp * tp / ((1.0 - g.eta) * std::abs(g.tau_i));
    }
    return 0.0;
}

// Crystal-length reduction factor sqrt(T_p / |tau_i|) when the pump is shorter than |tau_i|.
inline double effective_length(const InteractionGeometry& g, const PumpPulse& pump) {
    double ai = std::abs(g.tau_i);
    if (pump.duration_ps >= ai) return 1.0;
    return std::sqrt(pump.duration_ps / ai);
}

}  // namespace spdc
