#include "orbitpe/orbital_dynamics.hpp"
#include "orbitpe/error.hpp"
#include "orbitpe/rng.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace orbitpe;

namespace {

constexpr double kPi = std::numbers::pi;
const BodyConstants kBody{};

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

}  // namespace

// Kepler's equation

TEST(Kepler, CircularOrbitReturnsMeanAnomaly) { EXPECT_DOUBLE_EQ(solve_kepler(0.7, 0.0), 0.7); }

TEST(Kepler, ApoapsisIsAFixedPoint) { EXPECT_NEAR(solve_kepler(kPi, 0.1), kPi, 1e-15); }

TEST(Kepler, MatchesFrozenBisectionRoot) {
    // Root of E - 0.1 sin E = 1, from the bisection oracle to 1e-14.
    constexpr double kFrozen = 1.0885977523978936;
    EXPECT_NEAR(oracle::kepler_bisection(1.0, 0.1), kFrozen, 1e-14);
    EXPECT_NEAR(solve_kepler(1.0, 0.1), kFrozen, 1e-14);
}

TEST(Kepler, RejectsNonEllipticEccentricity) {
    EXPECT_THROW(solve_kepler(1.0, 1.0), DomainError);
    EXPECT_THROW(solve_kepler(1.0, -0.01), DomainError);
}

TEST(Kepler, ResidualAndOracleAgreementOverTenThousandSamples) {
    Rng rng(20240611);
    for (int k = 0; k < 10'000; ++k) {
        const double e = rng.uniform(0.0, 0.1);
        const double m = rng.uniform(0.0, 2.0 * kPi);
        const double E = solve_kepler(m, e);
        ASSERT_LT(std::abs(E - e * std::sin(E) - m), 1e-12) << "M=" << m << " e=" << e;
        ASSERT_NEAR(E, oracle::kepler_bisection(m, e), 1e-10);
        ASSERT_GE(E, 0.0);
        ASSERT_LT(E, 2.0 * kPi);
    }
}

// Element/state conversion

TEST(ElementsToState, CircularEquatorialCanonicalCase) {
    const double r0 = 700e3;
    const StateVector s = elements_to_state({r0, 0.0, 0.0, 0.0, 0.0, 0.0}, kBody);
    EXPECT_NEAR((s.position - Vec3(r0, 0, 0)).norm(), 0.0, 1e-9);
    EXPECT_NEAR((s.velocity - Vec3(0, std::sqrt(kBody.mu / r0), 0)).norm(), 0.0, 1e-12);
}

TEST(ElementsToState, VisVivaHolds) {
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const OrbitalElements el = oracle::random_elements(rng, kBody);
        const StateVector s = elements_to_state(el, kBody);
        const double lhs = s.velocity.squaredNorm();
        const double rhs = kBody.mu * (2.0 / s.position.norm() - 1.0 / el.semimajor_axis);
        ASSERT_LT(std::abs(lhs - rhs) / rhs, 1e-10);
    }
}

TEST(ElementsToState, AgreesWithIndependentOracle) {
    const OrbitalElements fixed{750'000.0, 0.05, 0.3, 1.0, 0.5, 2.0};
    const StateVector a = elements_to_state(fixed, kBody);
    const StateVector b = oracle::state_from_elements(fixed, kBody.mu);
    EXPECT_LT((a.position - b.position).norm(), 1e-6);
    EXPECT_LT((a.velocity - b.velocity).norm(), 1e-9);

    Rng rng(77);
    for (int k = 0; k < 1000; ++k) {
        const OrbitalElements el = oracle::random_elements(rng, kBody);
        const StateVector x = elements_to_state(el, kBody);
        const StateVector y = oracle::state_from_elements(el, kBody.mu);
        ASSERT_LT((x.position - y.position).norm() / y.position.norm(), 1e-12);
        ASSERT_LT((x.velocity - y.velocity).norm() / y.velocity.norm(), 1e-12);
    }
}

TEST(ElementsToState, RoundTripTenThousandRandomSets) {
    Rng rng(424242);
    for (int k = 0; k < 10'000; ++k) {
        const OrbitalElements el = oracle::random_elements(rng, kBody);
        const OrbitalElements back = state_to_elements(elements_to_state(el, kBody), kBody);
        ASSERT_LT(relative(back.semimajor_axis, el.semimajor_axis), 1e-9);
        ASSERT_LT(std::abs(back.eccentricity - el.eccentricity), 1e-9);
        ASSERT_LT(std::abs(back.inclination - el.inclination), 1e-9);
        ASSERT_LT(oracle::angle_gap(back.raan, el.raan), 1e-9);
        ASSERT_LT(oracle::angle_gap(back.arg_periapsis, el.arg_periapsis), 1e-9) << "e=" << el.eccentricity;
        ASSERT_LT(oracle::angle_gap(back.true_anomaly, el.true_anomaly), 1e-9);
        ASSERT_LT(oracle::angle_gap(back.arg_periapsis + back.true_anomaly, el.arg_periapsis + el.true_anomaly),
                  1e-9);
    }
}

TEST(StateToElements, CircularOrbitMeasuresAnomalyFromNode) {
    const OrbitalElements el{700e3, 0.0, 0.3, 1.0, 0.7, 0.4};
    const OrbitalElements back = state_to_elements(elements_to_state(el, kBody), kBody);
    EXPECT_EQ(back.arg_periapsis, 0.0);
    EXPECT_NEAR(back.true_anomaly, 1.1, 1e-9);
    EXPECT_NEAR(back.raan, 1.0, 1e-9);
}

TEST(StateToElements, EquatorialOrbitPutsNodeOnXAxis) {
    const OrbitalElements el{700e3, 0.01, 0.0, 0.5, 0.7, 0.4};
    const OrbitalElements back = state_to_elements(elements_to_state(el, kBody), kBody);
    EXPECT_EQ(back.raan, 0.0);
    EXPECT_NEAR(back.arg_periapsis, 1.2, 1e-9);
    EXPECT_NEAR(back.true_anomaly, 0.4, 1e-9);
}

TEST(StateToElements, RejectsDegenerateAndUnboundStates) {
    EXPECT_THROW(state_to_elements({Vec3(700e3, 0, 0), Vec3(100.0, 0, 0), 0.0}, kBody), UnsupportedOrbitError);
    const double escape = std::sqrt(2.0 * kBody.mu / 700e3);
    EXPECT_THROW(state_to_elements({Vec3(700e3, 0, 0), Vec3(0, 1.01 * escape, 0), 0.0}, kBody),
                 UnsupportedOrbitError);
}

// Coast propagation

TEST(Coast, ZeroIntervalIsIdentity) {
    const OrbitalElements el{750e3, 0.05, 0.3, 1.0, 0.5, 2.0};
    EXPECT_EQ(propagate_coast(el, 0.0, kBody), el);
}

TEST(Coast, FullPeriodReturnsSameAnomaly) {
    const OrbitalElements el{750e3, 0.05, 0.3, 1.0, 0.5, 2.0};
    const OrbitalElements after = propagate_coast(el, orbital_period(el.semimajor_axis, kBody), kBody);
    EXPECT_LT(oracle::angle_gap(after.true_anomaly, el.true_anomaly), 1e-9);
    EXPECT_EQ(after.semimajor_axis, el.semimajor_axis);
    EXPECT_EQ(after.raan, el.raan);
}

TEST(Coast, QuarterPeriodOnCircleAdvancesHalfPi) {
    const OrbitalElements el{750e3, 0.0, 0.3, 1.0, 0.0, 0.25};
    const OrbitalElements after = propagate_coast(el, orbital_period(el.semimajor_axis, kBody) / 4.0, kBody);
    EXPECT_LT(oracle::angle_gap(after.true_anomaly, 0.25 + kPi / 2.0), 1e-9);
}

TEST(Coast, TimeReversalThroughComplementaryInterval) {
    Rng rng(9);
    for (int k = 0; k < 1000; ++k) {
        const OrbitalElements el = oracle::random_elements(rng, kBody);
        const double T = orbital_period(el.semimajor_axis, kBody);
        const double dt = rng.uniform(0.0, 3.0 * T);
        const OrbitalElements there = propagate_coast(el, dt, kBody);
        const OrbitalElements back = propagate_coast(there, T - std::fmod(dt, T), kBody);
        ASSERT_LT(oracle::angle_gap(back.true_anomaly, el.true_anomaly), 1e-9);
    }
}

TEST(Coast, AnalyticCoastConservesEnergyAndMomentum) {
    Rng rng(31);
    for (int k = 0; k < 200; ++k) {
        const OrbitalElements el = oracle::random_elements(rng, kBody);
        const StateVector s0 = elements_to_state(el, kBody);
        const StateVector s1 = propagate_coast(s0, 240.0, kBody);
        ASSERT_LT(relative(specific_energy(s1, kBody), specific_energy(s0, kBody)), 1e-9);
        ASSERT_LT((angular_momentum(s1) - angular_momentum(s0)).norm() / angular_momentum(s0).norm(), 1e-9);
        ASSERT_DOUBLE_EQ(s1.epoch, 240.0);
    }
}

// Thrusted propagation

TEST(Thrusted, ZeroThrustMatchesAnalyticCoast) {
    Rng rng(1234);
    for (int k = 0; k < 50; ++k) {
        const StateVector s0 = elements_to_state(oracle::random_elements(rng, kBody), kBody);
        const StateVector rk = propagate_thrusted(s0, Vec3::Zero(), 240.0, 0.1, kBody);
        const StateVector an = propagate_coast(s0, 240.0, kBody);
        ASSERT_LT((rk.position - an.position).norm(), 1e-6);
        ASSERT_LT(relative(specific_energy(rk, kBody), specific_energy(s0, kBody)), 1e-6);
        ASSERT_LT((angular_momentum(rk) - angular_momentum(s0)).norm() / angular_momentum(s0).norm(), 1e-6);
        ASSERT_DOUBLE_EQ(rk.epoch, 240.0);
    }
}

TEST(Thrusted, ProgradeThrustRaisesEnergy) {
    const StateVector s0 = elements_to_state({750e3, 0.0, 0.1, 0.0, 0.0, 0.0}, kBody);
    const StateVector s1 = propagate_thrusted(s0, Vec3(0, 0.01, 0), 0.1, 0.1, kBody);
    EXPECT_GT(specific_energy_change(s0, s1, kBody), 0.0);
}

TEST(Thrusted, ProgradeAndRetrogradeEnergyChangesCancelToFirstOrder) {
    const double a = 0.1;
    const double dt = 0.1;
    Rng rng(8);
    for (int k = 0; k < 100; ++k) {
        const StateVector s0 = elements_to_state(oracle::random_elements(rng, kBody), kBody);
        const double up = specific_energy_change(s0, propagate_thrusted(s0, Vec3(0, a, 0), dt, dt, kBody), kBody);
        const double down = specific_energy_change(s0, propagate_thrusted(s0, Vec3(0, -a, 0), dt, dt, kBody), kBody);
        ASSERT_GT(up, 0.0);
        ASSERT_LT(down, 0.0);
        const double residual = up + down;
        ASSERT_LE(std::abs(residual), 1e-9 * std::abs(specific_energy(s0, kBody)));
        // What remains is the second-order kinetic term (a dt)^2.
        ASSERT_NEAR(residual, (a * dt) * (a * dt), 1e-3 * (a * dt) * (a * dt));
    }
}

TEST(Thrusted, EnforcesPerAxisLimitAndReportsImpact) {
    const StateVector s0 = elements_to_state({750e3, 0.0, 0.1, 0.0, 0.0, 0.0}, kBody);
    EXPECT_THROW(propagate_thrusted(s0, Vec3(0, 1.5, 0), 1.0, 0.1, kBody, 1.0), DomainError);
    EXPECT_THROW(propagate_thrusted(s0, Vec3::Zero(), 1.0, 2.0, kBody), DomainError);

    const StateVector falling{Vec3(601e3, 0, 0), Vec3(-200.0, 2000.0, 0), 0.0};
    try {
        propagate_thrusted(falling, Vec3::Zero(), 60.0, 0.1, kBody);
        FAIL() << "expected an impact";
    } catch (const ImpactError& e) {
        EXPECT_LE(e.state.position.norm(), kBody.surface_radius);
        EXPECT_LT(e.state.epoch, 60.0);
    }
}

// RSW frame

TEST(Rsw, CanonicalAxesForCircularEquatorialState) {
    const RswBasis b = rsw_basis({Vec3(700e3, 0, 0), Vec3(0, 2000, 0), 0.0});
    EXPECT_LT((b.radial - Vec3::UnitX()).norm(), 1e-15);
    EXPECT_LT((b.along_track - Vec3::UnitY()).norm(), 1e-15);
    EXPECT_LT((b.cross_track - Vec3::UnitZ()).norm(), 1e-15);
}

TEST(Rsw, OrthonormalRightHandedTriad) {
    Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
        const RswBasis b = rsw_basis(elements_to_state(oracle::random_elements(rng, kBody), kBody));
        ASSERT_LT(std::abs(b.radial.dot(b.along_track)), 1e-12);
        ASSERT_LT(std::abs(b.radial.dot(b.cross_track)), 1e-12);
        ASSERT_LT(std::abs(b.along_track.dot(b.cross_track)), 1e-12);
        for (const Vec3& v : {b.radial, b.along_track, b.cross_track}) {
            ASSERT_NEAR(v.norm(), 1.0, 1e-12);
        }
        ASSERT_NEAR(b.radial.cross(b.along_track).dot(b.cross_track), 1.0, 1e-12);
        const Vec3 x(1.0, -2.0, 3.0);
        ASSERT_LT((b.to_inertial(b.to_local(x)) - x).norm(), 1e-12);
    }
}

TEST(Rsw, ZeroAngularMomentumIsDegenerate) {
    EXPECT_THROW(rsw_basis({Vec3(700e3, 0, 0), Vec3(10, 0, 0), 0.0}), DegenerateFrameError);
}

TEST(Body, RejectsNonPositiveConstants) {
    EXPECT_THROW((BodyConstants{0.0, 600e3}.validate()), DomainError);
    EXPECT_THROW((BodyConstants{3.5e12, -1.0}.validate()), DomainError);
    EXPECT_THROW((OrbitalElements{610e3, 0.1, 0, 0, 0, 0}.validate(kBody)), DomainError);
}
