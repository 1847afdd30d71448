#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace spdc {

// Uniformly sampled real function y(x).
struct Series {
    std::vector<double> x;
    std::vector<double> y;
    double step = 0.0;

    std::size_t size() const { return x.size(); }
    double integral() const {
        double s = 0.0;
        for (double v : y) s += v;
        return s * step;
    }
    double max() const { return y.empty() ? 0.0 : *std::max_element(y.begin(), y.end()); }
    std::size_t argmax() const { return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin()); }
    double at(double xv) const {
        if (x.empty()) return 0.0;
        double f = (xv - x.front()) / step;
        if (f <= 0) return f < 0 ? 0.0 : y.front();
        auto k = static_cast<std::size_t>(f);
        if (k + 1 >= x.size()) return k + 1 == x.size() && f == static_cast<double>(k) ? y.back() : 0.0;
        double t = f - static_cast<double>(k);
        return (1.0 - t) * y[k] + t * y[k + 1];
    }
};

namespace series {

// x positions where y crosses level * max, outermost on each side of the peak
struct Crossing {
    double left, right;
};

inline std::optional<Crossing> level_crossings(const Series& s, double level) {
    if (s.y.empty()) return std::nullopt;
    std::size_t p = s.argmax();
    double thr = level * s.y[p];
    if (!(thr > 0)) return std::nullopt;
    std::size_t l = p, r = p;
    while (l > 0 && s.y[l - 1] >= thr) --l;
    while (r + 1 < s.size() && s.y[r + 1] >= thr) ++r;
    if (l == 0 || r + 1 == s.size()) return std::nullopt;
    auto interp = [&](std::size_t a, std::size_t b) {
        double ya = s.y[a], yb = s.y[b];
        return s.x[a] + (thr - ya) / (yb - ya) * (s.x[b] - s.x[a]);
    };
    return Crossing{interp(l - 1, l), interp(r + 1, r)};
}

inline double fwhm(const Series& s) {
    auto c = level_crossings(s, 0.5);
    return c ? c->right - c->left : std::numeric_limits<double>::quiet_NaN();
}

// int |a/int a - b/int b| dx, with b interpolated onto a's samples
inline double normalized_l1(const Series& a, const Series& b) {
    double ia = a.integral(), ib = b.integral();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a.y[k] / ia - b.at(a.x[k]) / ib);
    return sum * a.step;
}

// first local minimum of y strictly after x0
inline std::optional<double> first_minimum_after(const Series& s, double x0) {
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        if (s.x[k] <= x0) continue;
        if (s.y[k] <= s.y[k - 1] && s.y[k] < s.y[k + 1]) return s.x[k];
    }
    return std::nullopt;
}

// 10-90 % edge widths of a plateau-shaped profile, plateau taken as the maximum
inline std::optional<Crossing> edge_widths(const Series& s, double lo = 0.1, double hi = 0.9) {
    auto a = level_crossings(s, lo), b = level_crossings(s, hi);
    if (!a || !b) return std::nullopt;
    return Crossing{b->left - a->left, a->right - b->right};
}

// peak-to-peak variation relative to the mean over x in [lo, hi]
inline double ripple(const Series& s, double lo, double hi) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s.x[k] >= lo && s.x[k] <= hi) {
            mn = std::min(mn, s.y[k]);
            mx = std::max(mx, s.y[k]);
            sum += s.y[k];
            ++n;
        }
    return n ? (mx - mn) / (sum / n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace series

}  // namespace spdc
