#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string_view>

#include "spdc/units.hpp"

namespace spdc {

using cplx = std::complex<double>;

enum class Domain { spectral, temporal };

inline std::string_view to_string(Domain d) { return d == Domain::spectral ? "spectral" : "temporal"; }

// Uniform axis with the zero sample at index count/2 (FFT-centered layout):
// x_k = (k - count/2) * step, k = 0 .. count-1.
struct Axis {
    double step = 1.0;
    long count = 0;

    double value(long k) const { return static_cast<double>(k - count / 2) * step; }
    double front() const { return value(0); }
    double back() const { return value(count - 1); }
    long center() const { return count / 2; }
    // reciprocal axis under the DFT: step 2 pi / (count step)
    Axis dual() const { return Axis{2.0 * units::pi / (static_cast<double>(count) * step), count}; }
};

// Complex amplitude sampled on (signal, idler) axes. Rows follow the signal axis.
// Spectral grids hold psi(Omega_s, Omega_i) including the linear phase
// t_As Omega_s + t_Ai Omega_i; ref_time_s/i record those delays. Temporal grids
// hold phi on barred times t - t_Aj. |values|^2 * step_s * step_i sums to N.
struct AmplitudeGrid {
    Eigen::MatrixXcd values;
    Axis axis_s, axis_i;
    Domain domain = Domain::spectral;
    double ref_time_s = 0.0;
    double ref_time_i = 0.0;

    long rows() const { return values.rows(); }
    long cols() const { return values.cols(); }
    double cell() const { return axis_s.step * axis_i.step; }
    double norm() const { return values.squaredNorm() * cell(); }
};

}  // namespace spdc
