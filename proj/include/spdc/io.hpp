#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/series.hpp"
#include "spdc/sweep.hpp"

namespace spdc::io {

// Shortest round-trip decimal form; identical on every run.
inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_num(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("ParseError", "bad number '" + std::string(s) + "'");
    return v;
}

// 64-bit FNV-1a, used to tag outputs with the configuration that produced them.
inline std::string fnv1a_hex(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = hex[h & 0xf];
    return out;
}

enum class Content : std::uint8_t { amplitude = 0, coherence_signal = 1, coherence_idler = 2, probability = 3 };

inline const char* content_name(Content c) {
    switch (c) {
        case Content::amplitude: return "amplitude";
        case Content::coherence_signal: return "coherence_signal";
        case Content::coherence_idler: return "coherence_idler";
        case Content::probability: return "probability";
    }
    return "?";
}

inline const char* axis_unit(Domain d) { return d == Domain::spectral ? "rad/ps" : "ps"; }

// ---- CSV grid ---------------------------------------------------------------

inline void write_grid_csv(std::ostream& os, const AmplitudeGrid& g, std::string_view config_hash,
                           Content content = Content::amplitude) {
    os << "# schema: spdc-grid/1\n";
    os << "# content: " << content_name(content) << "\n";
    os << "# domain: " << to_string(g.domain) << "\n";
    os << "# axis_s: count=" << g.axis_s.count << " step=" << num(g.axis_s.step) << " unit=" << axis_unit(g.domain) << "\n";
    os << "# axis_i: count=" << g.axis_i.count << " step=" << num(g.axis_i.step) << " unit=" << axis_unit(g.domain) << "\n";
    os << "# ref_time_s_ps: " << num(g.ref_time_s) << "\n";
    os << "# ref_time_i_ps: " << num(g.ref_time_i) << "\n";
    os << "# config_hash: " << config_hash << "\n";
    os << "axis_s";
    for (long b = 0; b < g.cols(); ++b) {
        std::string x = num(g.axis_i.value(b));
        os << ",re:" << x << ",im:" << x;
    }
    os << "\n";
    for (long a = 0; a < g.rows(); ++a) {
        os << num(g.axis_s.value(a));
        for (long b = 0; b < g.cols(); ++b) os << ',' << num(g.values(a, b).real()) << ',' << num(g.values(a, b).imag());
        os << "\n";
    }
}

inline void write_real_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m, const Axis& as, const Axis& ai, Domain d,
                                  std::string_view config_hash) {
    os << "# schema: spdc-grid/1\n";
    os << "# content: probability\n";
    os << "# domain: " << to_string(d) << "\n";
    os << "# axis_s: count=" << as.count << " step=" << num(as.step) << " unit=" << axis_unit(d) << "\n";
    os << "# axis_i: count=" << ai.count << " step=" << num(ai.step) << " unit=" << axis_unit(d) << "\n";
    os << "# config_hash: " << config_hash << "\n";
    os << "axis_s";
    for (long b = 0; b < m.cols(); ++b) os << ',' << num(ai.value(b));
    os << "\n";
    for (long a = 0; a < m.rows(); ++a) {
        os << num(as.value(a));
        for (long b = 0; b < m.cols(); ++b) os << ',' << num(m(a, b));
        os << "\n";
    }
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t p = 0;
    while (true) {
        auto q = s.find(sep, p);
        out.push_back(s.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
        if (q == std::string_view::npos) break;
        p = q + 1;
    }
    return out;
}

inline std::string_view after(std::string_view s, std::string_view key) {
    auto p = s.find(key);
    if (p == std::string_view::npos) return {};
    s = s.substr(p + key.size());
    return s.substr(0, s.find(' '));
}

}  // namespace detail

inline AmplitudeGrid read_grid_csv(std::istream& is) {
    AmplitudeGrid g;
    std::string line;
    bool header_seen = false;
    long row = 0;
    while (std::getline(is, line)) {
        std::string_view v(line);
        if (v.rfind("# ", 0) == 0) {
            if (v.rfind("# domain: ", 0) == 0) g.domain = v.substr(10) == "temporal" ? Domain::temporal : Domain::spectral;
            if (v.rfind("# axis_s: ", 0) == 0) {
                g.axis_s.count = static_cast<long>(parse_num(detail::after(v, "count=")));
                g.axis_s.step = parse_num(detail::after(v, "step="));
            }
            if (v.rfind("# axis_i: ", 0) == 0) {
                g.axis_i.count = static_cast<long>(parse_num(detail::after(v, "count=")));
                g.axis_i.step = parse_num(detail::after(v, "step="));
            }
            if (v.rfind("# ref_time_s_ps: ", 0) == 0) g.ref_time_s = parse_num(v.substr(17));
            if (v.rfind("# ref_time_i_ps: ", 0) == 0) g.ref_time_i = parse_num(v.substr(17));
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            g.values.resize(g.axis_s.count, g.axis_i.count);
            continue;
        }
        auto f = detail::split(v, ',');
        if (static_cast<long>(f.size()) != 1 + 2 * g.axis_i.count || row >= g.axis_s.count)
            throw Error("ParseError", "grid CSV row has the wrong shape");
        for (long b = 0; b < g.axis_i.count; ++b)
            g.values(row, b) = cplx(parse_num(f[static_cast<std::size_t>(1 + 2 * b)]), parse_num(f[static_cast<std::size_t>(2 + 2 * b)]));
        ++row;
    }
    if (row != g.axis_s.count) throw Error("ParseError", "grid CSV truncated");
    return g;
}

// ---- binary grid ------------------------------------------------------------
// 64-byte little-endian header:
//   0  char[8] "SPDCGRID"      8 u16 version (1)      10 u16 element (1 complex128, 2 float64)
//  12  u8 domain (0/1)        13 u8 content          14 u16 reserved (0)
//  16  u64 n_s                24 u64 n_i
//  32  f64 step_s             40 f64 step_i          48 f64 ref_time_s     56 f64 ref_time_i
// followed by n_s * n_i elements, signal index outermost.

inline constexpr char bin_magic[8] = {'S', 'P', 'D', 'C', 'G', 'R', 'I', 'D'};

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(b, sizeof(T));
}

template <class T>
T get(std::istream& is) {
    char b[sizeof(T)];
    if (!is.read(b, sizeof(T))) throw Error("ParseError", "binary grid truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

inline void write_header(std::ostream& os, std::uint16_t element, Domain d, Content c, const Axis& as, const Axis& ai,
                         double rs, double ri) {
    os.write(bin_magic, 8);
    put<std::uint16_t>(os, 1);
    put<std::uint16_t>(os, element);
    put<std::uint8_t>(os, d == Domain::spectral ? 0 : 1);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(c));
    put<std::uint16_t>(os, 0);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(as.count));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(ai.count));
    put<double>(os, as.step);
    put<double>(os, ai.step);
    put<double>(os, rs);
    put<double>(os, ri);
}

}  // namespace detail

inline void write_grid_bin(std::ostream& os, const AmplitudeGrid& g, Content content = Content::amplitude) {
    detail::write_header(os, 1, g.domain, content, g.axis_s, g.axis_i, g.ref_time_s, g.ref_time_i);
    for (long a = 0; a < g.rows(); ++a)
        for (long b = 0; b < g.cols(); ++b) {
            detail::put<double>(os, g.values(a, b).real());
            detail::put<double>(os, g.values(a, b).imag());
        }
}

inline void write_real_matrix_bin(std::ostream& os, const Eigen::MatrixXd& m, const Axis& as, const Axis& ai, Domain d) {
    detail::write_header(os, 2, d, Content::probability, as, ai, 0.0, 0.0);
    for (long a = 0; a < m.rows(); ++a)
        for (long b = 0; b < m.cols(); ++b) detail::put<double>(os, m(a, b));
}

struct BinHeader {
    std::uint16_t version, element;
    Domain domain;
    Content content;
    Axis axis_s, axis_i;
    double ref_time_s, ref_time_i;
};

inline BinHeader read_bin_header(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, bin_magic, 8) != 0) throw Error("ParseError", "not an SPDCGRID file");
    BinHeader h{};
    h.version = detail::get<std::uint16_t>(is);
    h.element = detail::get<std::uint16_t>(is);
    h.domain = detail::get<std::uint8_t>(is) == 0 ? Domain::spectral : Domain::temporal;
    h.content = static_cast<Content>(detail::get<std::uint8_t>(is));
    detail::get<std::uint16_t>(is);
    h.axis_s.count = static_cast<long>(detail::get<std::uint64_t>(is));
    h.axis_i.count = static_cast<long>(detail::get<std::uint64_t>(is));
    h.axis_s.step = detail::get<double>(is);
    h.axis_i.step = detail::get<double>(is);
    h.ref_time_s = detail::get<double>(is);
    h.ref_time_i = detail::get<double>(is);
    return h;
}

inline AmplitudeGrid read_grid_bin(std::istream& is) {
    auto h = read_bin_header(is);
    if (h.element != 1) throw Error("ParseError", "binary grid does not hold complex elements");
    AmplitudeGrid g;
    g.domain = h.domain;
    g.axis_s = h.axis_s;
    g.axis_i = h.axis_i;
    g.ref_time_s = h.ref_time_s;
    g.ref_time_i = h.ref_time_i;
    g.values.resize(h.axis_s.count, h.axis_i.count);
    for (long a = 0; a < g.rows(); ++a)
        for (long b = 0; b < g.cols(); ++b) {
            double re = detail::get<double>(is);
            double im = detail::get<double>(is);
            g.values(a, b) = cplx(re, im);
        }
    return g;
}

// ---- one-dimensional series ---------------------------------------------------

inline void write_series_csv(std::ostream& os, const Series& s, std::string_view quantity, std::string_view x_name,
                             std::string_view y_name, std::string_view config_hash) {
    os << "# schema: spdc-series/1\n# quantity: " << quantity << "\n# config_hash: " << config_hash << "\n";
    os << x_name << ',' << y_name << "\n";
    for (std::size_t k = 0; k < s.size(); ++k) os << num(s.x[k]) << ',' << num(s.y[k]) << "\n";
}

// ---- Schmidt report -----------------------------------------------------------

inline constexpr std::string_view report_fields =
    "kappa_exact,kappa_nb,kappa_gaussian,purity,pair_number,fluctuation_b,n_modes,truncation_mass,convergence_delta";

inline std::string report_row(const SchmidtReport& r) {
    std::ostringstream os;
    os << num(r.kappa_exact) << ',' << num(r.kappa_nb) << ',' << num(r.kappa_gaussian) << ',' << num(r.purity) << ','
       << num(r.pair_number) << ',' << num(r.fluctuation_b) << ',' << r.mode_spectrum.size() << ','
       << num(r.truncation_mass) << ',' << (r.convergence_delta ? num(*r.convergence_delta) : std::string("nan"));
    return os.str();
}

inline void write_report_csv(std::ostream& os, const SchmidtReport& r, std::string_view config_hash) {
    os << "# schema: spdc-schmidt/1\n# config_hash: " << config_hash << "\n" << report_fields << "\n" << report_row(r) << "\n";
}

// ---- sweeps -------------------------------------------------------------------

inline void write_pump_sweep_csv(std::ostream& os, const std::vector<PumpSweepRow>& rows, std::string_view config_hash) {
    os << "# schema: spdc-sweep-tp/1\n# config_hash: " << config_hash << "\n";
    os << "tp_ps,kappa_gaussian,kappa_exact,pair_number,error\n";
    for (const auto& r : rows)
        os << num(r.tp) << ',' << num(r.kappa_gaussian) << ',' << num(r.kappa_exact) << ',' << num(r.pair_number) << ','
           << r.error << "\n";
}

inline void write_signal_sweep_csv(std::ostream& os, const std::vector<SignalSweepRow>& rows, std::string_view design_name,
                                   std::string_view config_hash) {
    os << "# schema: spdc-sweep-lambda/1\n# config_hash: " << config_hash << "\n";
    os << "lambda_s_requested_nm,lambda_s_nm,lambda_i_nm,tau_s_ps,tau_i_ps,eta,kappa_min_gaussian,tp_min_ps,"
       << design_name << ",relabeled,error\n";
    for (const auto& r : rows)
        os << num(r.lambda_s_requested) << ',' << num(r.lambda_s) << ',' << num(r.lambda_i) << ',' << num(r.tau_s) << ','
           << num(r.tau_i) << ',' << num(r.eta) << ',' << num(r.kappa_min_gaussian) << ',' << num(r.tp_min) << ','
           << num(r.design_value) << ',' << (r.relabeled ? 1 : 0) << ',' << r.error << "\n";
}

}  // namespace spdc::io
