#pragma once

#include "spdc/config.hpp"

namespace spdc::testing {

inline const InteractionGeometry& geometry(Preset p) {
    static const InteractionGeometry ppktp = resolve_geometry(preset(Preset::ppktp_counter));
    static const InteractionGeometry kdp = resolve_geometry(preset(Preset::kdp_asymmetric));
    static const InteractionGeometry bbo = resolve_geometry(preset(Preset::bbo_symmetric));
    switch (p) {
        case Preset::ppktp_counter: return ppktp;
        case Preset::kdp_asymmetric: return kdp;
        case Preset::bbo_symmetric: return bbo;
    }
    return ppktp;
}

inline const InteractionGeometry& ppktp() { return geometry(Preset::ppktp_counter); }
inline const InteractionGeometry& kdp() { return geometry(Preset::kdp_asymmetric); }
inline const InteractionGeometry& bbo() { return geometry(Preset::bbo_symmetric); }

// Linearized-model geometry built straight from time constants.
inline InteractionGeometry synthetic(double tau_s, double tau_i) {
    InteractionGeometry g;
    g.geometry = tau_i > 0 && tau_s > 0 ? Geometry::counter_propagating : Geometry::co_propagating;
    g.tau_s = tau_s;
    g.tau_i = tau_i;
    g.eta = tau_s / tau_i;
    g.delta_tau = std::abs(tau_i - tau_s);
    g.t_As = 3.0;
    g.t_Ai = -1.5;
    return g;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace spdc::testing
