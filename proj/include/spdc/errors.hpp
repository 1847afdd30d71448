#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spdc {

// Every error carries a stable machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace detail {
template <class... Args>
std::string cat(Args&&... args) {
    std::ostringstream os;
    os.precision(10);
    (os << ... << args);
    return os.str();
}
}  // namespace detail

class OutOfValidityWindow : public Error {
public:
    OutOfValidityWindow(double wavelength_nm, double lo_nm, double hi_nm)
        : Error("OutOfValidityWindow", detail::cat("wavelength ", wavelength_nm, " nm outside Sellmeier window [", lo_nm,
                                                   ", ", hi_nm, "] nm")),
          wavelength_nm(wavelength_nm), lo_nm(lo_nm), hi_nm(hi_nm) {}
    double wavelength_nm, lo_nm, hi_nm;
};

class NoPhaseMatch : public Error {
public:
    explicit NoPhaseMatch(const std::string& what) : Error("NoPhaseMatch", what) {}
};

class AmbiguousMatch : public Error {
public:
    explicit AmbiguousMatch(std::vector<double> candidates_nm)
        : Error("AmbiguousMatch", describe(candidates_nm)), candidates_nm(std::move(candidates_nm)) {}
    std::vector<double> candidates_nm;

private:
    static std::string describe(const std::vector<double>& c) {
        std::ostringstream os;
        os.precision(10);
        os << c.size() << " phase-matched signal wavelengths:";
        for (double x : c) os << ' ' << x;
        return os.str();
    }
};

class GridTooNarrow : public Error {
public:
    GridTooNarrow(std::string axis, double required, double given)
        : Error("GridTooNarrow", detail::cat(axis, ": required ", required, ", given ", given)),
          axis(std::move(axis)), required(required), given(given) {}
    std::string axis;
    double required, given;
};

class NotSpectral : public Error {
public:
    NotSpectral() : Error("NotSpectral", "expected a spectral-domain grid") {}
};

class NotTemporal : public Error {
public:
    NotTemporal() : Error("NotTemporal", "expected a temporal-domain grid") {}
};

class NonPowerOfTwo : public Error {
public:
    explicit NonPowerOfTwo(long n) : Error("NonPowerOfTwo", detail::cat("axis length ", n, " is not a power of two")) {}
};

class DegenerateVelocities : public Error {
public:
    explicit DegenerateVelocities(double delta_tau)
        : Error("DegenerateVelocities", detail::cat("|tau_i - tau_s| = ", delta_tau, " ps below threshold")) {}
};

class RegimeNotApplicable : public Error {
public:
    explicit RegimeNotApplicable(const std::string& what) : Error("RegimeNotApplicable", what) {}
};

class TruncatedGrid : public Error {
public:
    TruncatedGrid(double edge_mass, double limit)
        : Error("TruncatedGrid", detail::cat("edge-ring mass fraction ", edge_mass, " exceeds ", limit)),
          edge_mass(edge_mass) {}
    double edge_mass;
};

class NotConverged : public Error {
public:
    explicit NotConverged(double delta)
        : Error("NotConverged", detail::cat("kappa changed by ", delta, " (relative) on grid refinement")), delta(delta) {}
    double delta;
};

class NoInteriorMinimum : public Error {
public:
    explicit NoInteriorMinimum(const std::string& what) : Error("NoInteriorMinimum", what) {}
};

class ConfigError : public Error {
public:
    ConfigError(int line, std::string field, const std::string& what)
        : Error("ConfigError", line > 0 ? detail::cat("line ", line, ": ", field, ": ", what) : detail::cat(field, ": ", what)),
          line(line), field(std::move(field)) {}
    int line;
    std::string field;
};

class UnknownPreset : public Error {
public:
    explicit UnknownPreset(const std::string& name) : Error("UnknownPreset", "unknown preset '" + name + "'") {}
};

}  // namespace spdc
