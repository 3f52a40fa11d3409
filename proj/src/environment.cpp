#include "orbitpe/environment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace orbitpe {

void ThrottleVector::validate() const {
    for (const int c : {radial, along_track, cross_track}) {
        if (c < -1 || c > 1) {
            throw DomainError(fmt::format("throttle component {} outside {{-1, 0, +1}}", c));
        }
    }
}

std::string_view to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::none: return "none";
        case TerminationReason::time_limit: return "time_limit";
        case TerminationReason::impact: return "impact";
    }
    return "none";
}

TerminationReason termination_reason_from_string(std::string_view text) {
    if (text == "none") return TerminationReason::none;
    if (text == "time_limit") return TerminationReason::time_limit;
    if (text == "impact") return TerminationReason::impact;
    throw FormatError(fmt::format("unknown termination reason '{}'", text));
}

void EnvironmentConfig::validate() const {
    if (!(decision_interval > 0.0) || !(substep > 0.0) || substep > decision_interval) {
        throw DomainError(fmt::format("need 0 < substep ({}) <= decision_interval ({})", substep, decision_interval));
    }
    if (!(pursuer_max_accel >= 0.0) || !(evader.max_accel >= 0.0) || !(evader.activation_range >= 0.0)) {
        throw DomainError("accelerations and activation range must be non-negative");
    }
}

Observation make_observation(double mission_time, const StateVector& pursuer, const StateVector& evader) {
    const RswBasis frame = rsw_basis(pursuer);
    Observation obs;
    obs.mission_time = mission_time;
    obs.pursuer_position = pursuer.position;
    obs.pursuer_velocity = pursuer.velocity;
    obs.evader_position = evader.position;
    obs.evader_velocity = evader.velocity;
    obs.relative_position = frame.to_local(evader.position - pursuer.position);
    obs.relative_velocity = frame.to_local(evader.velocity - pursuer.velocity);
    obs.range = obs.relative_position.norm();
    obs.range_rate = obs.range > 0.0 ? obs.relative_position.dot(obs.relative_velocity) / obs.range : 0.0;
    return obs;
}

ThrottleVector evader_policy(const Observation& observation, const EvaderConfig& config) {
    if (observation.range <= config.activation_range) {
        return ThrottleVector{0, 1, 0};
    }
    return ThrottleVector{};
}

Environment::Environment(EnvironmentConfig config) : config_(config) { config_.validate(); }

Observation Environment::reset(const Scenario& scenario) {
    const ConstraintReport report = verify_constraints(scenario);
    if (!report.all_passed()) {
        throw DomainError("scenario rejected:\n" + report.failure_summary());
    }
    scenario_ = scenario;
    pursuer_ = elements_to_state(scenario.pursuer, scenario.body, 0.0);
    evader_ = elements_to_state(scenario.evader, scenario.body, 0.0);
    steps_ = 0;
    max_steps_ = static_cast<long>(std::ceil(scenario.constraints.mission_duration / config_.decision_interval - 1e-9));
    started_ = true;
    terminated_ = false;
    observation_ = make_observation(0.0, pursuer_, evader_);
    return observation_;
}

StepResult Environment::step(const ThrottleVector& action) {
    if (!started_) {
        throw Error("step() called before reset()");
    }
    if (terminated_) {
        throw EpisodeFinishedError("episode already terminated");
    }
    action.validate();

    const auto& body = scenario_.body;
    const double dt = config_.decision_interval;
    const Vec3 pursuer_accel = action.as_vector() * config_.pursuer_max_accel;
    const Vec3 evader_accel = evader_policy(observation_, config_.evader).as_vector() * config_.evader.max_accel;
    const double t = static_cast<double>(steps_ + 1) * dt;

    const StateVector pursuer_start = pursuer_;
    const StateVector evader_start = evader_;
    auto advance_pursuer = [&](double span) {
        return propagate_thrusted(pursuer_start, pursuer_accel, span, std::min(config_.substep, span), body,
                                  config_.pursuer_max_accel);
    };
    auto advance_evader = [&](double span) {
        return propagate_thrusted(evader_start, evader_accel, span, std::min(config_.substep, span), body,
                                  config_.evader.max_accel);
    };

    StepResult result;
    double mission_time = t;
    try {
        pursuer_ = advance_pursuer(dt);
        try {
            evader_ = advance_evader(dt);
        } catch (const ImpactError& impact) {
            evader_ = impact.state;
            mission_time = impact.state.epoch;
            pursuer_ = advance_pursuer(mission_time - pursuer_start.epoch);
            result.termination_reason = TerminationReason::impact;
        }
    } catch (const ImpactError& impact) {
        pursuer_ = impact.state;
        mission_time = impact.state.epoch;
        try {
            evader_ = advance_evader(mission_time - evader_start.epoch);
        } catch (const ImpactError& both) {
            evader_ = both.state;
        }
        result.termination_reason = TerminationReason::impact;
    }

    ++steps_;
    if (result.termination_reason == TerminationReason::none && steps_ >= max_steps_) {
        result.termination_reason = TerminationReason::time_limit;
    }
    result.terminated = result.termination_reason != TerminationReason::none;
    // Keep the clock on the decision grid rather than accumulating dt.
    if (result.termination_reason != TerminationReason::impact) {
        pursuer_.epoch = t;
        evader_.epoch = t;
    }
    observation_ = make_observation(mission_time, pursuer_, evader_);
    terminated_ = result.terminated;
    result.observation = observation_;
    return result;
}

}  // namespace orbitpe
