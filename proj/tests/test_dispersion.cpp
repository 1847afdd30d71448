#include <gtest/gtest.h>

#include "spdc/dispersion.hpp"
#include "support.hpp"

using namespace spdc;
using spdc::testing::rel;

namespace {

CrystalConfig toy_medium(double n0) {
    SellmeierModel m;
    m.ordinary.a = n0 * n0;
    m.extraordinary.a = n0 * n0;
    m.lo_nm = 100.0;
    m.hi_nm = 10000.0;
    m.source = "constant index";
    CrystalConfig c;
    c.custom_model = m;
    return c;
}

struct Cut {
    Species species;
    double theta_deg;
};

const Cut cuts[] = {{Species::KTP, 90.0}, {Species::KDP, 67.8}, {Species::KDP, 90.0}, {Species::BBO, 28.8}, {Species::BBO, 0.0}};

}  // namespace

TEST(Dispersion, ToyMediumWavenumber) {
    auto c = toy_medium(1.5);
    WaveSpec w{1000.0, Polarization::ordinary, Role::signal};
    EXPECT_NEAR(wavenumber(c, w), 3.0 * units::pi, 1e-12);
}

TEST(Dispersion, ToyMediumGroupDelayIsPhaseDelay) {
    auto c = toy_medium(1.7);
    for (double nm : {400.0, 1064.0, 3000.0}) {
        WaveSpec w{nm, Polarization::extraordinary, Role::pump};
        EXPECT_NEAR(inverse_group_velocity(c, w), 1.7 / units::c_mm_per_ps, 1e-12);
        EXPECT_NEAR(inverse_group_velocity_fd(c, w), 1.7 / units::c_mm_per_ps, 1e-9);
    }
}

TEST(Dispersion, AnalyticSlopeMatchesFiniteDifference) {
    for (const auto& cut : cuts) {
        CrystalConfig c;
        c.species = cut.species;
        c.theta_deg = cut.theta_deg;
        const auto& m = c.model();
        // keep the stencil inside the window
        auto lams = numeric::linspace(m.lo_nm * 1.001, m.hi_nm * 0.999, 80);
        for (auto pol : {Polarization::ordinary, Polarization::extraordinary})
            for (double nm : lams) {
                WaveSpec w{nm, pol, Role::signal};
                double a = inverse_group_velocity(c, w), f = inverse_group_velocity_fd(c, w);
                EXPECT_LT(rel(f, a), 1e-6) << to_string(cut.species) << " " << nm << " nm";
            }
    }
}

TEST(Dispersion, IndexIsSmoothOnNanometreSteps) {
    // n(L + 1) - n(L) against the Simpson integral of the analytic slope over the
    // step; a jump or kink inside the step shows up in full, smooth curvature does not.
    for (auto s : {Species::KTP, Species::KDP, Species::BBO}) {
        const auto& m = sellmeier_model(s);
        for (auto pol : {Polarization::ordinary, Polarization::extraordinary}) {
            double worst = 0.0;
            for (double nm = std::ceil(m.lo_nm); nm + 1.0 <= m.hi_nm; nm += 1.0) {
                double n0 = refractive_index(m, pol, 90.0, nm), n1 = refractive_index(m, pol, 90.0, nm + 1.0);
                double d0 = detail::index_and_slope(m, pol, units::pi / 2, nm).dn_dL;
                double dm = detail::index_and_slope(m, pol, units::pi / 2, nm + 0.5).dn_dL;
                double d1 = detail::index_and_slope(m, pol, units::pi / 2, nm + 1.0).dn_dL;
                worst = std::max(worst, std::abs(n1 - n0 - (d0 + 4.0 * dm + d1) / 6.0 * 1e-3));
            }
            EXPECT_LT(worst, 1e-8) << to_string(s);
        }
    }
}

TEST(Dispersion, AngleTuningEndpoints) {
    for (auto s : {Species::KTP, Species::KDP, Species::BBO}) {
        const auto& m = sellmeier_model(s);
        for (double nm : {600.0, 1000.0, 1400.0}) {
            double no = std::sqrt(m.ordinary.n2(nm * 1e-3)), ne = std::sqrt(m.extraordinary.n2(nm * 1e-3));
            EXPECT_NEAR(refractive_index(m, Polarization::extraordinary, 0.0, nm), no, 1e-14);
            EXPECT_NEAR(refractive_index(m, Polarization::extraordinary, 90.0, nm), ne, 1e-14);
            EXPECT_EQ(refractive_index(m, Polarization::ordinary, 37.0, nm), no);
            double th = units::deg_to_rad(41.0), n = refractive_index(m, Polarization::extraordinary, 41.0, nm);
            EXPECT_NEAR(1.0 / (n * n), std::pow(std::cos(th) / no, 2) + std::pow(std::sin(th) / ne, 2), 1e-14);
        }
    }
}

TEST(Dispersion, RepeatedEvaluationIsIdentical) {
    CrystalConfig c{Species::BBO, 10.0, 28.8};
    WaveSpec w{1514.0, Polarization::ordinary, Role::signal};
    EXPECT_EQ(refractive_index(c, w), refractive_index(c, w));
    EXPECT_EQ(inverse_group_velocity(c, w), inverse_group_velocity(c, w));
}

TEST(Dispersion, IndicesArePhysical) {
    for (auto s : {Species::KTP, Species::KDP, Species::BBO}) {
        const auto& m = sellmeier_model(s);
        for (double nm : numeric::linspace(m.lo_nm, m.hi_nm, 40))
            for (auto pol : {Polarization::ordinary, Polarization::extraordinary})
                EXPECT_GT(refractive_index(m, pol, 90.0, nm), 1.0);
    }
}

TEST(Dispersion, OutsideWindowThrows) {
    CrystalConfig c{Species::KDP};
    WaveSpec w{1700.0, Polarization::ordinary, Role::idler};
    EXPECT_THROW(refractive_index(c, w), OutOfValidityWindow);
    try {
        refractive_index(c, w);
    } catch (const OutOfValidityWindow& e) {
        EXPECT_EQ(e.wavelength_nm, 1700.0);
        EXPECT_EQ(e.hi_nm, sellmeier_model(Species::KDP).hi_nm);
        EXPECT_EQ(e.code(), "OutOfValidityWindow");
    }
    EXPECT_THROW(inverse_group_velocity(CrystalConfig{Species::BBO}, WaveSpec{150.0}), OutOfValidityWindow);
}

TEST(Dispersion, KdpPumpAndSignalShareGroupVelocity) {
    CrystalConfig c{Species::KDP, 10.0, 67.8};
    double kp = inverse_group_velocity(c, {415.0, Polarization::extraordinary, Role::pump});
    double ks = inverse_group_velocity(c, {830.0, Polarization::ordinary, Role::signal});
    EXPECT_LT(std::abs(0.5 * c.length_mm * (kp - ks)), 0.02);
}

TEST(Dispersion, PpktpTimeConstants) {
    CrystalConfig c{Species::KTP, 10.0, 90.0, 800.0};
    const auto& g = spdc::testing::ppktp();
    double kp = inverse_group_velocity(c, g.pump), ks = inverse_group_velocity(c, g.signal);
    double ki = inverse_group_velocity(c, g.idler);
    EXPECT_LT(rel(0.5 * c.length_mm * (kp - ks), 0.67), 0.05);
    EXPECT_LT(rel(0.5 * c.length_mm * (kp + ki), 63.0), 0.05);
}

TEST(Dispersion, ConfigValidation) {
    CrystalConfig c;
    c.qpm_order = 2;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.theta_deg = 95.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.length_mm = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.poling_period_nm = -1.0;
    EXPECT_THROW(c.validate(), Error);
    EXPECT_NO_THROW(CrystalConfig{}.validate());
}
