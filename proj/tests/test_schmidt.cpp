#include <gtest/gtest.h>

#include <random>

#include "spdc/schmidt.hpp"
#include "support.hpp"

using namespace spdc;
using spdc::testing::rel;

namespace {

// kappa = N^2 / B with B the literal fourfold sum
// B = sum psi*(s,i) psi*(s',i') psi(s,i') psi(s',i) d^4
double kappa_quadruple_sum(const AmplitudeGrid& g) {
    const long ns = g.rows(), ni = g.cols();
    double d2 = g.cell();
    double n = 0.0;
    for (long a = 0; a < ns; ++a)
        for (long b = 0; b < ni; ++b) n += std::norm(g.values(a, b));
    n *= d2;
    cplx bsum = 0.0;
    for (long s = 0; s < ns; ++s)
        for (long sp = 0; sp < ns; ++sp)
            for (long i = 0; i < ni; ++i)
                for (long ip = 0; ip < ni; ++ip)
                    bsum += std::conj(g.values(s, i)) * std::conj(g.values(sp, ip)) * g.values(s, ip) * g.values(sp, i);
    return n * n / (bsum.real() * d2 * d2);
}

AmplitudeGrid random_grid(long ns, long ni, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    AmplitudeGrid g;
    g.axis_s = Axis{0.37, ns};
    g.axis_i = Axis{0.21, ni};
    g.values.resize(ns, ni);
    for (long b = 0; b < ni; ++b)
        for (long a = 0; a < ns; ++a) g.values(a, b) = cplx(d(rng), d(rng));
    return g;
}

SchmidtOptions no_audit() {
    SchmidtOptions o;
    o.audit = false;
    return o;
}

double kgauss_oracle(double css, double cii, double csi) { return std::sqrt(css * cii / (css * cii - csi * csi)); }

}  // namespace

TEST(Schmidt, SingularRouteMatchesQuadrupleSum) {
    std::vector<AmplitudeGrid> grids = {random_grid(16, 16, 1), random_grid(8, 32, 2), random_grid(32, 32, 3)};
    GridSpec spec;
    spec.n = 32;
    spec.sinc_reach = 8.0 * units::pi;
    spec.pump_reach = 2.0;
    spec.time_reach = 0.5;
    grids.push_back(build_jsa(spdc::testing::kdp(), PumpPulse{0.3, 1.0}, spec, JsaMode::exact_sinc_linearized));
    for (const auto& g : grids) {
        auto r = schmidt_exact(g, no_audit());
        EXPECT_LT(rel(r.kappa_exact, kappa_quadruple_sum(g)), 1e-8);
        EXPECT_LT(rel(r.kappa_nb, r.kappa_exact), 1e-6);
    }
}

TEST(Schmidt, GaussianAmplitudeMatchesClosedForm) {
    struct Case {
        double tau_s, tau_i, tp;
    };
    for (auto c : {Case{0.5, -1.2, 0.4}, Case{0.67, 63.0, 4.05}}) {
        auto g = spdc::testing::synthetic(c.tau_s, c.tau_i);
        PumpPulse p{c.tp, 1.0};
        GridSpec spec;
        spec.n = 1024;
        auto grid = build_jsa(g, p, spec, JsaMode::gaussian);
        auto r = schmidt_exact(grid);
        double h = 0.5 * c.tp * c.tp;
        double expect = kgauss_oracle(h + gamma_fwhm * c.tau_s * c.tau_s, h + gamma_fwhm * c.tau_i * c.tau_i,
                                      h + gamma_fwhm * c.tau_s * c.tau_i);
        EXPECT_LT(rel(r.kappa_exact, expect), 1e-3);
        EXPECT_LT(rel(schmidt_gaussian(g, p), expect), 1e-12);
    }
}

TEST(Schmidt, SeparableAmplitudeHasSingleMode) {
    AmplitudeGrid g;
    g.axis_s = Axis{0.1, 64};
    g.axis_i = Axis{0.2, 64};
    g.values.resize(64, 64);
    for (long b = 0; b < 64; ++b)
        for (long a = 0; a < 64; ++a) {
            double x = g.axis_s.value(a), y = g.axis_i.value(b);
            g.values(a, b) = std::exp(-x * x) * std::polar(std::exp(-0.3 * y * y), 0.7 * y * y);
        }
    auto r = schmidt_exact(g);
    EXPECT_NEAR(r.kappa_exact, 1.0, 1e-6);
    EXPECT_NEAR(r.purity, 1.0, 1e-6);
    ASSERT_FALSE(r.mode_spectrum.empty());
    EXPECT_NEAR(r.mode_spectrum[0], 1.0, 1e-6);
}

TEST(Schmidt, GaugeInvariance) {
    auto g = build_jsa(spdc::testing::ppktp(), PumpPulse{8.0, 0.01}, GridSpec{}, JsaMode::exact_sinc_full);
    double k0 = schmidt_exact(g).kappa_exact;
    auto h = g;
    for (long b = 0; b < h.cols(); ++b)
        for (long a = 0; a < h.rows(); ++a)
            h.values(a, b) *= cplx(-2.5, 0.75) * std::polar(1.0, 13.0 * h.axis_s.value(a) - 4.2 * h.axis_i.value(b));
    EXPECT_LT(rel(schmidt_exact(h).kappa_exact, k0), 1e-8);
    EXPECT_LT(rel(kappa_gram(h), k0), 1e-8);
}

TEST(Schmidt, ReportIsConsistent) {
    PumpPulse p{4.05, 0.01};
    const auto& g = spdc::testing::ppktp();
    auto grid = build_jsa(g, p, GridSpec{}, JsaMode::exact_sinc_full);
    auto r = schmidt_exact(grid);
    EXPECT_GE(r.kappa_exact, 1.0);
    EXPECT_LT(rel(r.kappa_nb, r.kappa_exact), 1e-6);
    EXPECT_DOUBLE_EQ(r.purity, 1.0 / r.kappa_exact);
    EXPECT_LT(r.truncation_mass, 1e-4);
    double sum = 0.0, inv = 0.0;
    for (std::size_t k = 0; k < r.mode_spectrum.size(); ++k) {
        if (k > 0) EXPECT_LE(r.mode_spectrum[k], r.mode_spectrum[k - 1]);
        EXPECT_GE(r.mode_spectrum[k], 1e-12);
        sum += r.mode_spectrum[k];
        inv += r.mode_spectrum[k] * r.mode_spectrum[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_LT(rel(1.0 / inv, r.kappa_exact), 1e-9);
    EXPECT_LT(rel(r.pair_number, 1e-4 * std::sqrt(units::pi) * 4.05 / (2.0 * g.delta_tau)), 0.01);
    auto t = grid;
    t.domain = Domain::temporal;
    EXPECT_THROW(schmidt_exact(t), NotSpectral);
}

TEST(Schmidt, FlatGridFailsTruncationAudit) {
    AmplitudeGrid g;
    g.axis_s = Axis{0.1, 32};
    g.axis_i = Axis{0.1, 32};
    g.values = Eigen::MatrixXcd::Constant(32, 32, cplx(1.0, 0.0));
    try {
        schmidt_exact(g);
        FAIL();
    } catch (const TruncatedGrid& e) {
        EXPECT_GT(e.edge_mass, 1e-4);
    }
    EXPECT_NEAR(schmidt_exact(g, no_audit()).kappa_exact, 1.0, 1e-9);
}

TEST(Schmidt, ClosedFormMinimum) {
    // symmetric pair: minimum reaches a single mode
    auto sym = spdc::testing::synthetic(-0.237, 0.237);
    auto o = optimal_pump_duration(sym, gamma_fwhm, MinimizeMethod::closed_form);
    EXPECT_NEAR(o.kappa_min, 1.0, 1e-12);
    EXPECT_LT(rel(o.tp_min, 0.147), 0.02);
    EXPECT_LT(rel(o.tp_min, std::sqrt(2.0 * gamma_fwhm) * 0.237), 1e-12);

    const auto& pp = spdc::testing::ppktp();
    auto op = optimal_pump_duration(pp, gamma_fwhm, MinimizeMethod::closed_form);
    EXPECT_LT(rel(op.tp_min, 4.05), 0.02);
    EXPECT_LT(rel(op.kappa_min, kappa_min_gaussian(pp.eta)), 1e-9);
    EXPECT_LT(rel(op.kappa_min, (1.0 + pp.eta) / (1.0 - pp.eta)), 1e-12);

    const auto& bb = spdc::testing::bbo();
    EXPECT_LT(rel(optimal_pump_duration(bb, gamma_fwhm, MinimizeMethod::closed_form).tp_min, 0.147), 0.02);

    auto flat = optimal_pump_duration(spdc::testing::synthetic(0.0, 0.72), gamma_fwhm, MinimizeMethod::closed_form);
    EXPECT_EQ(flat.tp_min, 0.0);
    EXPECT_EQ(flat.kappa_min, 1.0);
}

TEST(Schmidt, GaussianKappaShape) {
    for (auto taus : {std::pair{-0.237, 0.237}, std::pair{0.67, 63.0}, std::pair{0.3, -2.0}}) {
        auto g = spdc::testing::synthetic(taus.first, taus.second);
        double t0 = closed_form_tp_min(g, gamma_fwhm);
        double k0 = schmidt_gaussian(g, PumpPulse{t0, 1.0});
        double prev = k0;
        for (double f : numeric::logspace(1.05, 100.0, 30)) {
            double k = schmidt_gaussian(g, PumpPulse{f * t0, 1.0});
            EXPECT_GT(k, prev);
            prev = k;
            EXPECT_GE(schmidt_gaussian(g, PumpPulse{t0 / f, 1.0}), k0);
        }
        // long-pump asymptote T_p / (sqrt(2 gamma) delta_tau); the leading correction is
        // 1 / 2X^2 with X the asymptote itself, so 50 T_p^min suffices only when
        // 50 sqrt|eta| / |1 - eta| is well above 7
        double tp = 50.0 * t0;
        double asym = tp / (std::sqrt(2.0 * gamma_fwhm) * g.delta_tau);
        double k = schmidt_gaussian(g, PumpPulse{tp, 1.0});
        if (asym > 7.5)
            EXPECT_LT(rel(k, asym), 0.01);
        else
            EXPECT_NEAR(rel(k, asym), 0.5 / (asym * asym), 0.2 / (asym * asym));
        EXPECT_LT(rel(schmidt_gaussian(g, PumpPulse{1e4 * t0, 1.0}), 1e4 * t0 / (std::sqrt(2.0 * gamma_fwhm) * g.delta_tau)), 1e-5);
        // agrees with the coefficient route
        for (double f : {0.2, 1.0, 7.0})
            EXPECT_LT(rel(kappa_from_params(gaussian_params(g, PumpPulse{f * t0, 1.0})), schmidt_gaussian(g, PumpPulse{f * t0, 1.0})),
                      1e-10);
    }
    EXPECT_THROW(schmidt_gaussian(spdc::testing::synthetic(0.5, 0.5), PumpPulse{1.0, 1.0}), DegenerateVelocities);
}

TEST(Schmidt, NumericMinimumNearClosedForm) {
    const auto& g = spdc::testing::ppktp();
    NumericMinOptions opt;
    opt.prescan_points = 24;
    opt.span = 10.0;
    opt.mode = JsaMode::exact_sinc_linearized;
    auto o = optimal_pump_duration(g, gamma_fwhm, MinimizeMethod::numeric_min, opt);
    EXPECT_GT(o.tp_min, 2.0);
    EXPECT_LT(o.tp_min, 10.0);
    EXPECT_GE(o.kappa_min, 1.0);
    EXPECT_LT(o.kappa_min, 1.1);
}

TEST(Schmidt, NumericMinimumReportsMonotoneObjective) {
    // with tau_s = 0 kappa only grows with T_p
    NumericMinOptions opt;
    opt.prescan_points = 12;
    opt.span = 10.0;
    opt.mode = JsaMode::gaussian;
    EXPECT_THROW(optimal_pump_duration(spdc::testing::synthetic(0.0, 0.72), gamma_fwhm, MinimizeMethod::numeric_min, opt),
                 NoInteriorMinimum);
}

TEST(Schmidt, TimingHeuristics) {
    auto flat = spdc::testing::synthetic(0.0, 0.72);
    auto h = timing_heuristics(flat, PumpPulse{10.0, 1.0});
    EXPECT_DOUBLE_EQ(h.dt_uncond, 10.0 / std::sqrt(2.0));
    EXPECT_EQ(h.regime, TimingRegime::long_pump);
    EXPECT_DOUBLE_EQ(h.dt_cond, flat.delta_tau);

    // long pumps: estimate and Gaussian kappa both grow linearly in T_p
    const auto& k = spdc::testing::kdp();
    double r0 = 0.0;
    for (double tp : {20.0, 50.0, 200.0}) {
        PumpPulse p{tp, 1.0};
        auto t = timing_heuristics(k, p);
        ASSERT_EQ(t.regime, TimingRegime::long_pump);
        double r = t.mode_estimate / schmidt_gaussian(k, p);
        if (r0 == 0.0) r0 = r;
        EXPECT_LT(rel(r, r0), 0.01);
    }

    // ultrashort pump: conditional width set by the pump
    const auto& pp = spdc::testing::ppktp();
    PumpPulse us{0.05, 1.0};
    auto u = timing_heuristics(pp, us);
    EXPECT_EQ(u.regime, TimingRegime::ultrashort_pump);
    EXPECT_DOUBLE_EQ(u.dt_cond, 0.05 * (1.0 - pp.eta));
    EXPECT_LT(rel(u.mode_estimate, schmidt_gaussian(pp, us)), 0.25);

    EXPECT_EQ(timing_heuristics(pp, PumpPulse{4.05, 1.0}).regime, TimingRegime::intermediate);
}

TEST(Schmidt, GridConvergence) {
    struct Case {
        const InteractionGeometry* g;
        double tp;
    };
    for (auto c : {Case{&spdc::testing::ppktp(), 4.05}, Case{&spdc::testing::kdp(), 0.1}}) {
        double d = grid_convergence_delta(*c.g, PumpPulse{c.tp, 0.01}, GridSpec{}, JsaMode::exact_sinc_full);
        EXPECT_LT(d, 5e-3);
    }
    AnalyzeOptions ao;
    ao.check_convergence = true;
    ao.convergence_limit = 0.0;
    ao.mode = JsaMode::exact_sinc_linearized;
    EXPECT_THROW(analyze(spdc::testing::kdp(), PumpPulse{0.1, 0.01}, ao), NotConverged);
    ao.convergence_limit = 5e-3;
    auto r = analyze(spdc::testing::kdp(), PumpPulse{0.1, 0.01}, ao);
    ASSERT_TRUE(r.convergence_delta);
    EXPECT_LT(*r.convergence_delta, 5e-3);
    EXPECT_LT(rel(r.kappa_gaussian, schmidt_gaussian(spdc::testing::kdp(), PumpPulse{0.1, 0.01})), 1e-15);
}
