#include "orbitpe/actions.hpp"
#include "orbitpe/environment.hpp"
#include "orbitpe/error.hpp"
#include "orbitpe/navball_agent.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace orbitpe;

namespace {

Scenario default_scenario(std::uint64_t seed) { return sample_scenario(default_evader_elements(), {}, seed); }

Scenario trailing_pair(double lag, double pursuer_da = 0.0) {
    Scenario s;
    s.evader = default_evader_elements();
    s.pursuer = s.evader;
    s.pursuer.semimajor_axis += pursuer_da;
    s.pursuer.true_anomaly = -lag / s.evader.semimajor_axis;
    return s;
}

EnvironmentConfig passive_evader() {
    EnvironmentConfig cfg;
    cfg.evader.activation_range = 0.0;
    return cfg;
}

Observation at_range(double range) {
    Observation o;
    o.relative_position = Vec3(0, range, 0);
    o.range = range;
    return o;
}

}  // namespace

TEST(Reset, DefaultScenarioStartsNearTheTargetSeparation) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Environment env;
        const Observation o = env.reset(default_scenario(seed));
        EXPECT_GE(o.range, 2200.0);
        EXPECT_LE(o.range, 3000.0);
        EXPECT_EQ(o.mission_time, 0.0);
    }
}

TEST(Reset, IsDeterministic) {
    Environment a, b;
    EXPECT_EQ(a.reset(default_scenario(5)), b.reset(default_scenario(5)));
    a.step({0, 1, 0});
    EXPECT_EQ(a.reset(default_scenario(5)), b.observation());
    EXPECT_EQ(a.step_count(), 0);
}

TEST(Reset, CoincidentVesselsGiveZeroRangeAndRate) {
    Environment env;
    const Observation o = env.reset(trailing_pair(0.0));
    EXPECT_EQ(o.range, 0.0);
    EXPECT_EQ(o.range_rate, 0.0);
}

TEST(Reset, InvalidScenarioCarriesTheConstraintReport) {
    Scenario bad = default_scenario(1);
    bad.pursuer.eccentricity = 0.2;
    Environment env;
    try {
        env.reset(bad);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("eccentricity"), std::string::npos);
    }
    EXPECT_FALSE(env.active());
}

TEST(Step, ZeroActionFollowsAnalyticCoastAndEndsAtTimeLimit) {
    const Scenario s = default_scenario(11);
    Environment env(passive_evader());
    env.reset(s);
    StepResult r;
    for (int k = 0; k < 240; ++k) {
        ASSERT_TRUE(env.active());
        r = env.step({});
        ASSERT_EQ(r.terminated, k == 239);
    }
    EXPECT_EQ(r.termination_reason, TerminationReason::time_limit);
    EXPECT_EQ(r.observation.mission_time, 240.0);
    const StateVector p = propagate_coast(elements_to_state(s.pursuer, s.body), 240.0, s.body);
    const StateVector e = propagate_coast(elements_to_state(s.evader, s.body), 240.0, s.body);
    EXPECT_LT((env.pursuer_state().position - p.position).norm(), 1e-6);
    EXPECT_LT((env.evader_state().position - e.position).norm(), 1e-6);
    EXPECT_THROW(env.step({}), EpisodeFinishedError);
}

TEST(Step, EpisodeLengthIsCeilingOfDurationOverInterval) {
    EnvironmentConfig cfg;
    cfg.decision_interval = 0.7;
    Environment env(cfg);
    env.reset(default_scenario(2));
    long steps = 0;
    while (env.active()) {
        env.step({});
        ++steps;
    }
    EXPECT_EQ(steps, 343);
    EXPECT_EQ(env.max_steps(), 343);
    EXPECT_GE(env.observation().mission_time, 240.0);
}

TEST(Step, ForwardThrustRaisesPursuerEnergyEveryStep) {
    const Scenario s = trailing_pair(2700.0);
    Environment env(passive_evader());
    env.reset(s);
    double energy = specific_energy(env.pursuer_state(), s.body);
    while (env.active()) {
        env.step({0, 1, 0});
        const double next = specific_energy(env.pursuer_state(), s.body);
        ASSERT_GT(next, energy) << "t=" << env.observation().mission_time;
        energy = next;
    }
}

TEST(Step, ClosingGeometryReportsNegativeRangeRate) {
    // A lower orbit is faster, so the trailing pursuer gains on the evader.
    Environment env(passive_evader());
    const Observation o = env.reset(trailing_pair(2000.0, -2000.0));
    EXPECT_LT(o.range_rate, 0.0);
    EXPECT_LT(env.step({}).observation.range, o.range);
}

TEST(Step, RejectsBadThrottleAndUseBeforeReset) {
    Environment env;
    EXPECT_THROW(env.step({}), Error);
    env.reset(default_scenario(1));
    EXPECT_THROW(env.step({0, 2, 0}), DomainError);
    EXPECT_EQ(env.step_count(), 0);
}

TEST(Step, SurfaceImpactTerminatesTheEpisode) {
    Scenario s = trailing_pair(2700.0);
    s.evader.semimajor_axis = s.body.surface_radius + 3000.0;
    s.pursuer.semimajor_axis = s.evader.semimajor_axis;
    Environment env;
    env.reset(s);
    StepResult r;
    while (env.active()) {
        r = env.step({-1, 0, 0});
    }
    EXPECT_EQ(r.termination_reason, TerminationReason::impact);
    EXPECT_LT(r.observation.mission_time, 240.0);
    EXPECT_LE(env.pursuer_state().position.norm(), s.body.surface_radius);
    EXPECT_NEAR(env.evader_state().epoch, env.pursuer_state().epoch, 1e-9);
}

TEST(Observation, SelfConsistentAtEveryStep) {
    const Scenario s = default_scenario(21);
    Environment env;
    Observation o = env.reset(s);
    for (;;) {
        const RswBasis b = rsw_basis({o.pursuer_position, o.pursuer_velocity, 0.0});
        ASSERT_NEAR(o.range, o.relative_position.norm(), 1e-9 * std::max(1.0, o.range));
        ASSERT_LT((o.relative_position - b.to_local(o.evader_position - o.pursuer_position)).norm(), 1e-9);
        ASSERT_LT((o.relative_velocity - b.to_local(o.evader_velocity - o.pursuer_velocity)).norm(), 1e-9);
        ASSERT_NEAR(o.range_rate, o.relative_position.dot(o.relative_velocity) / o.range, 1e-9);
        if (!env.active()) break;
        o = env.step(action_to_throttle(navball_decide(o))).observation;
    }
}

TEST(Observation, RangeRateMatchesFiniteDifferenceOfRange) {
    const Scenario s = default_scenario(8);
    const StateVector p = elements_to_state(s.pursuer, s.body);
    const StateVector e = elements_to_state(s.evader, s.body);
    const double h = 1e-3;
    const double ahead = (propagate_coast(e, h, s.body).position - propagate_coast(p, h, s.body).position).norm();
    const double behind =
        (propagate_coast(e, -h, s.body).position - propagate_coast(p, -h, s.body).position).norm();
    const Observation o = make_observation(0.0, p, e);
    EXPECT_NEAR(o.range_rate, (ahead - behind) / (2.0 * h), 1e-6);
}

TEST(Evader, RangeTriggeredProgradeBurn) {
    EXPECT_EQ(evader_policy(at_range(2700.0)), (ThrottleVector{0, 0, 0}));
    EXPECT_EQ(evader_policy(at_range(500.0)), (ThrottleVector{0, 1, 0}));
    EXPECT_EQ(evader_policy(at_range(1000.0)), (ThrottleVector{0, 1, 0}));
    EXPECT_EQ(evader_policy(at_range(1000.0 + 1e-9)), (ThrottleVector{0, 0, 0}));
}

TEST(PhysicalConsistency, CoastClosestApproachMatchesDenseAnalyticOracle) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const Scenario s = default_scenario(seed);
        Environment env(passive_evader());
        Observation o = env.reset(s);
        double closest = o.range;
        while (env.active()) {
            closest = std::min(closest, env.step({}).observation.range);
        }
        EXPECT_NEAR(closest, oracle::dense_coast_min_range(s, 240.0, 0.05), 0.5) << "seed " << seed;
    }
}

TEST(Determinism, SameActionsGiveBitIdenticalTrajectories) {
    auto run = [](const Scenario& s) {
        std::vector<Observation> trace;
        Environment env;
        Observation o = env.reset(s);
        while (env.active()) {
            o = env.step(action_to_throttle(navball_decide(o))).observation;
            trace.push_back(o);
        }
        return trace;
    };
    EXPECT_EQ(run(default_scenario(4)), run(default_scenario(4)));
}

TEST(Determinism, IndependentInstancesOnThreadsMatchSerialRuns) {
    auto final_obs = [](std::uint64_t seed) {
        Environment env;
        Observation o = env.reset(default_scenario(seed));
        while (env.active()) {
            o = env.step(action_to_throttle(navball_decide(o))).observation;
        }
        return o;
    };
    std::vector<Observation> parallel(4);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < 4; ++i) {
        threads.emplace_back([&, i] { parallel[i] = final_obs(100 + i); });
    }
    for (auto& t : threads) t.join();
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(parallel[i], final_obs(100 + i));
    }
}

TEST(Config, RejectsInconsistentSettings) {
    EnvironmentConfig cfg;
    cfg.substep = 2.0;
    EXPECT_THROW(Environment{cfg}, DomainError);
    cfg = {};
    cfg.pursuer_max_accel = -1.0;
    EXPECT_THROW(Environment{cfg}, DomainError);
    EXPECT_EQ(termination_reason_from_string(to_string(TerminationReason::impact)), TerminationReason::impact);
    EXPECT_THROW(termination_reason_from_string("sunset"), FormatError);
}
