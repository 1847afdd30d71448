#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace spdc::numeric {

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

inline bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

inline long next_pow2(double x) {
    long n = 1;
    while (static_cast<double>(n) < x) n <<= 1;
    return n;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k < n; ++k) v[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return v;
}

// Root of f inside [a, b] where f(a), f(b) differ in sign. Bisection shrinks the
// bracket, then secant steps polish to rtol; a secant step leaving the bracket
// falls back to bisection.
template <class F>
double bisect_secant(F&& f, double a, double b, double rtol = 1e-12, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int it = 0; it < 40 && std::abs(b - a) > 1e-6 * std::abs(a + b); ++it) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) { a = m; fa = fm; } else { b = m; fb = fm; }
    }
    double x0 = a, f0 = fa, x1 = b, f1 = fb;
    for (int it = 0; it < max_iter; ++it) {
        double x2 = (f1 != f0) ? x1 - f1 * (x1 - x0) / (f1 - f0) : 0.5 * (a + b);
        if (!(x2 > std::min(a, b) && x2 < std::max(a, b))) x2 = 0.5 * (a + b);
        double f2 = f(x2);
        if (f2 == 0.0) return x2;
        if ((f2 < 0) == (fa < 0)) { a = x2; fa = f2; } else { b = x2; fb = f2; }
        if (std::abs(x2 - x1) <= rtol * std::abs(x2)) return x2;
        x0 = x1; f0 = f1;
        x1 = x2; f1 = f2;
    }
    return x1;
}

struct Minimum {
    double x;
    double fx;
};

// Golden-section minimization of f on [a, b] down to an absolute bracket width tol.
template <class F>
Minimum golden_section(F&& f, double a, double b, double tol, int max_iter = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return fc < fd ? Minimum{c, fc} : Minimum{d, fd};
}

}  // namespace spdc::numeric
