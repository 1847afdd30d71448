#include <gtest/gtest.h>

#include "spdc/phasematch.hpp"
#include "support.hpp"

using namespace spdc;
using spdc::testing::rel;

namespace {

void expect_energy_conserved(const InteractionGeometry& g) {
    double lhs = 1.0 / g.pump.wavelength_nm, rhs = 1.0 / g.signal.wavelength_nm + 1.0 / g.idler.wavelength_nm;
    EXPECT_LT(rel(rhs, lhs), 1e-9);
}

// least-squares slope of log|y| against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        double lx = std::log(x[k]), ly = std::log(std::abs(y[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(PhaseMatch, PpktpCounterPropagating) {
    const auto& g = spdc::testing::ppktp();
    EXPECT_LT(rel(g.signal.wavelength_nm, 1141.0), 0.005);
    EXPECT_LT(rel(g.idler.wavelength_nm, 2932.0), 0.005);
    EXPECT_LT(rel(g.tau_s, 0.67), 0.05);
    EXPECT_LT(rel(g.tau_i, 63.0), 0.05);
    EXPECT_NEAR(g.eta, 0.01, 0.005);
    EXPECT_GT(g.tau_i, 0.0);
    EXPECT_FALSE(g.relabeled);
    expect_energy_conserved(g);
    EXPECT_LT(std::abs(2.0 * phase_mismatch(g, 0, 0, MismatchMode::full_sellmeier)), 1e-6);
}

TEST(PhaseMatch, KdpAsymmetric) {
    const auto& g = spdc::testing::kdp();
    EXPECT_LT(std::abs(g.tau_s), 0.02);
    EXPECT_LT(rel(g.tau_i, 0.72), 0.05);
    EXPECT_EQ(g.signal.polarization, Polarization::ordinary);
    expect_energy_conserved(g);
    EXPECT_LT(std::abs(2.0 * phase_mismatch(g, 0, 0, MismatchMode::full_sellmeier)), 1e-6);
}

TEST(PhaseMatch, BboSymmetric) {
    const auto& g = spdc::testing::bbo();
    EXPECT_LT(rel(g.tau_s, -0.237), 0.05);
    EXPECT_LT(rel(g.tau_i, 0.237), 0.05);
    EXPECT_NEAR(g.eta, -1.0, 0.02);
    // near-degenerate at twice the pump wavelength
    EXPECT_NEAR(g.signal.wavelength_nm, 1514.0, 5.0);
    EXPECT_NEAR(g.idler.wavelength_nm, 1514.0, 5.0);
    expect_energy_conserved(g);
    EXPECT_LT(std::abs(2.0 * phase_mismatch(g, 0, 0, MismatchMode::full_sellmeier)), 1e-6);
}

TEST(PhaseMatch, ClosureHoldsThroughWavenumbers) {
    const auto& g = spdc::testing::ppktp();
    double ks = wavenumber(g.crystal, g.signal), ki = wavenumber(g.crystal, g.idler), kp = wavenumber(g.crystal, g.pump);
    double kg = 2.0 * units::pi / (*g.crystal.poling_period_nm * 1e-3);
    EXPECT_LT(std::abs(ks - ki - kp + kg) * g.crystal.length_mm * 1e3, 1e-6);
    const auto& b = spdc::testing::bbo();
    EXPECT_LT(std::abs(wavenumber(b.crystal, b.signal) + wavenumber(b.crystal, b.idler) - wavenumber(b.crystal, b.pump)) *
                  b.crystal.length_mm * 1e3,
              1e-6);
}

TEST(PhaseMatch, DegenerateComplement) {
    EXPECT_DOUBLE_EQ(units::complement_nm(757.0, 1514.0), 1514.0);
    auto g = make_geometry(CrystalConfig{Species::BBO, 10.0, 28.8}, Geometry::co_propagating, *PolarizationScheme::parse("e-oe"),
                           757.0, 1514.0);
    EXPECT_DOUBLE_EQ(g.signal.wavelength_nm, g.idler.wavelength_nm);
}

TEST(PhaseMatch, RelabelingEnforcesOrdering) {
    // signal on the extraordinary axis walks off from the pump; the ordinary photon does not
    CrystalConfig c{Species::KDP, 10.0, 67.8};
    auto g = make_geometry(c, Geometry::co_propagating, *PolarizationScheme::parse("e-eo"), 415.0, 830.0);
    EXPECT_TRUE(g.relabeled);
    EXPECT_LE(std::abs(g.tau_s), std::abs(g.tau_i));
    EXPECT_EQ(g.signal.polarization, Polarization::ordinary);
    EXPECT_EQ(g.signal.role, Role::signal);
    EXPECT_GE(g.eta, -1.0);
    EXPECT_LE(g.eta, 1.0);
    EXPECT_DOUBLE_EQ(g.delta_tau, std::abs(g.tau_i - g.tau_s));
}

TEST(PhaseMatch, CounterPropagatingEtaStaysSmall) {
    auto pol = *PolarizationScheme::parse("e-ee");
    CrystalConfig c{Species::KTP, 10.0, 90.0};
    // idler stays below the 3.54 um edge of the KTP fit
    for (double ls : numeric::linspace(1100.0, 1500.0, 9)) {
        c.poling_period_nm = design_poling_period(c, Geometry::counter_propagating, pol, 821.4, ls);
        auto g = solve_phase_matching(c, 821.4, Geometry::counter_propagating, pol);
        EXPECT_NEAR(g.signal.wavelength_nm, ls, 1e-6 * ls);
        EXPECT_GT(g.tau_i, 0.0);
        EXPECT_LT(std::abs(g.eta), 0.1);
        expect_energy_conserved(g);
    }
}

TEST(PhaseMatch, DesignModesRoundTrip) {
    auto pol = *PolarizationScheme::parse("e-oe");
    CrystalConfig c{Species::BBO, 10.0, 0.0};
    double th = design_tuning_angle(c, Geometry::co_propagating, pol, 757.0, 1514.0);
    EXPECT_NEAR(th, 28.8, 0.5);
    c.theta_deg = th;
    auto g = make_geometry(c, Geometry::co_propagating, pol, 757.0, 1514.0);
    EXPECT_LT(std::abs(phase_mismatch(g, 0, 0, MismatchMode::full_sellmeier)), 1e-6);

    CrystalConfig k{Species::KTP, 10.0, 90.0};
    double period = design_poling_period(k, Geometry::counter_propagating, *PolarizationScheme::parse("e-ee"), 821.4, 1141.0);
    EXPECT_NEAR(period, 800.0, 8.0);
}

TEST(PhaseMatch, LinearizationErrorIsSecondOrder) {
    for (const auto* g : {&spdc::testing::ppktp(), &spdc::testing::kdp()}) {
        std::vector<double> eps = numeric::logspace(0.05, 0.5, 8), dm, dp;
        double base = phase_mismatch(*g, 0, 0, MismatchMode::full_sellmeier);
        for (double e : eps) {
            double ws = 3.0 * e, wi = -1.7 * e;
            dm.push_back(phase_mismatch(*g, ws, wi, MismatchMode::full_sellmeier) - base -
                         phase_mismatch(*g, ws, wi, MismatchMode::linearized));
            dp.push_back(propagation_phase(*g, ws, wi, MismatchMode::full_sellmeier) -
                         propagation_phase(*g, ws, wi, MismatchMode::linearized));
        }
        EXPECT_NEAR(loglog_slope(eps, dm), 2.0, 0.1);
        EXPECT_NEAR(loglog_slope(eps, dp), 2.0, 0.1);
    }
}

TEST(PhaseMatch, LinearizedForms) {
    const auto& k = spdc::testing::kdp();
    EXPECT_LT(std::abs(phase_mismatch(k, 5.0, 0.0, MismatchMode::linearized)), 0.02 * 5.0);
    EXPECT_EQ(propagation_phase(k, 0.0, 0.0, MismatchMode::linearized), 0.0);
    const auto& g = spdc::testing::ppktp();
    EXPECT_DOUBLE_EQ(phase_mismatch(g, 0.3, -0.2, MismatchMode::linearized), 0.3 * g.tau_s - 0.2 * g.tau_i);
}

TEST(PhaseMatch, ArrivalTimesCoPropagating) {
    for (const auto* g : {&spdc::testing::kdp(), &spdc::testing::bbo()}) {
        EXPECT_NEAR(g->t_As - g->t_Ap, -g->tau_s, 1e-12);
        EXPECT_NEAR(g->t_Ai - g->t_Ap, -g->tau_i, 1e-12);
    }
}

TEST(PhaseMatch, AmbiguousRootsAreReported) {
    // type-0 near the zero-dispersion point: two distinct signal/idler pairs
    CrystalConfig c{Species::KTP, 10.0, 90.0, 26700.0};
    auto pol = *PolarizationScheme::parse("e-ee");
    try {
        solve_phase_matching(c, 800.0, Geometry::co_propagating, pol);
        FAIL() << "expected AmbiguousMatch";
    } catch (const AmbiguousMatch& e) {
        ASSERT_EQ(e.candidates_nm.size(), 2u);
        SolveOptions opt;
        opt.near_signal_nm = e.candidates_nm[1];
        auto g = solve_phase_matching(c, 800.0, Geometry::co_propagating, pol, opt);
        EXPECT_NEAR(std::min(g.signal.wavelength_nm, g.idler.wavelength_nm), e.candidates_nm[1], 1e-6);
    }
}

TEST(PhaseMatch, Failures) {
    auto pol = *PolarizationScheme::parse("e-ee");
    EXPECT_THROW(solve_phase_matching(CrystalConfig{Species::KTP}, 821.4, Geometry::counter_propagating, pol), NoPhaseMatch);
    // BBO type I is far from matched at 5 deg
    EXPECT_THROW(solve_phase_matching(CrystalConfig{Species::BBO, 10.0, 5.0}, 757.0, Geometry::co_propagating,
                                      *PolarizationScheme::parse("e-oo")),
                 NoPhaseMatch);
    EXPECT_THROW(solve_phase_matching(CrystalConfig{Species::KDP}, 180.0, Geometry::co_propagating, pol), OutOfValidityWindow);
}

TEST(PhaseMatch, PolarizationSchemeText) {
    auto p = PolarizationScheme::parse("e-oe");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->str(), "e-oe");
    EXPECT_FALSE(PolarizationScheme::parse("eoe"));
    EXPECT_FALSE(PolarizationScheme::parse("x-oe"));
    EXPECT_EQ(parse_geometry("counter"), Geometry::counter_propagating);
    EXPECT_EQ(parse_geometry("co"), Geometry::co_propagating);
    EXPECT_FALSE(parse_geometry("sideways"));
}
