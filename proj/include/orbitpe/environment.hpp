#pragma once

#include "orbitpe/orbital_dynamics.hpp"
#include "orbitpe/scenario.hpp"

#include <string_view>

namespace orbitpe {

/// Telemetry handed to agents at each decision tick. Relative quantities are
/// evader minus pursuer, resolved in the pursuer's RSW frame. The relative
/// velocity is the inertial relative velocity expressed in that frame (no
/// frame-rotation term), so range_rate = r_rel . v_rel / |r_rel|.
struct Observation {
    double mission_time = 0.0;
    Vec3 pursuer_position = Vec3::Zero();
    Vec3 pursuer_velocity = Vec3::Zero();
    Vec3 evader_position = Vec3::Zero();
    Vec3 evader_velocity = Vec3::Zero();
    Vec3 relative_position = Vec3::Zero();
    Vec3 relative_velocity = Vec3::Zero();
    double range = 0.0;
    double range_rate = 0.0;  ///< negative while closing

    bool operator==(const Observation&) const = default;
};

/// Per-axis throttle in {-1, 0, +1}, ordered (radial, along-track, cross-track).
struct ThrottleVector {
    int radial = 0;
    int along_track = 0;
    int cross_track = 0;

    /// Throws DomainError if any component is outside {-1, 0, +1}.
    void validate() const;
    Vec3 as_vector() const { return Vec3(radial, along_track, cross_track); }
    bool is_zero() const { return radial == 0 && along_track == 0 && cross_track == 0; }
    bool operator==(const ThrottleVector&) const = default;
};

enum class TerminationReason { none, time_limit, impact };

std::string_view to_string(TerminationReason reason);
TerminationReason termination_reason_from_string(std::string_view text);

struct StepResult {
    Observation observation;
    bool terminated = false;
    TerminationReason termination_reason = TerminationReason::none;

    bool operator==(const StepResult&) const = default;
};

/// Range-triggered evader: coasts until the pursuer is within
/// activation_range (inclusive), then burns prograde along-track.
struct EvaderConfig {
    double activation_range = 1000.0;  ///< m
    double max_accel = 0.25;           ///< m/s^2
};

struct EnvironmentConfig {
    double decision_interval = 1.0;  ///< s
    double substep = 0.1;            ///< s, RK4 step
    double pursuer_max_accel = 1.0;  ///< m/s^2 per axis
    EvaderConfig evader;

    void validate() const;
};

/// Builds an observation from the two inertial states. Throws
/// DegenerateFrameError if the pursuer's RSW frame is undefined.
Observation make_observation(double mission_time, const StateVector& pursuer, const StateVector& evader);

ThrottleVector evader_policy(const Observation& observation, const EvaderConfig& config = {});

/// Two-vessel pursuit-evasion episode. Single owner; not thread-safe, but
/// independent instances share nothing.
class Environment {
public:
    explicit Environment(EnvironmentConfig config = {});

    /// Validates the scenario (DomainError carrying the constraint report on
    /// failure), places both vessels at t = 0 and returns the first observation.
    Observation reset(const Scenario& scenario);

    /// Advances one decision interval. Throws EpisodeFinishedError after
    /// termination and Error if reset() was never called.
    StepResult step(const ThrottleVector& action);

    const Observation& observation() const { return observation_; }
    const StateVector& pursuer_state() const { return pursuer_; }
    const StateVector& evader_state() const { return evader_; }
    const EnvironmentConfig& config() const { return config_; }
    const Scenario& scenario() const { return scenario_; }
    bool active() const { return started_ && !terminated_; }
    bool terminated() const { return terminated_; }
    long step_count() const { return steps_; }
    /// ceil(mission_duration / decision_interval)
    long max_steps() const { return max_steps_; }

private:
    EnvironmentConfig config_;
    Scenario scenario_;
    StateVector pursuer_;
    StateVector evader_;
    Observation observation_;
    long steps_ = 0;
    long max_steps_ = 0;
    bool started_ = false;
    bool terminated_ = false;
};

}  // namespace orbitpe
