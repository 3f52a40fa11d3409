#pragma once

#include "orbitpe/actions.hpp"
#include "orbitpe/environment.hpp"

#include <vector>

namespace orbitpe {

/// Target-mode navball cues, in the pursuer's RSW frame.
struct NavballReading {
    Vec3 target_direction = Vec3::Zero();  ///< unit line of sight to the evader
    Vec3 target_prograde = Vec3::Zero();   ///< unit pursuer velocity relative to the evader
    bool prograde_defined = false;         ///< false when the relative velocity vanishes
    double range = 0.0;
    double closing_speed = 0.0;            ///< -range_rate
};

/// Approach-speed schedule entry: `speed` applies while range > `above_range`.
struct ApproachStage {
    double above_range;
    double speed;
};

struct PursuitGains {
    /// Checked in order; the first stage whose threshold the range exceeds wins.
    std::vector<ApproachStage> schedule{{1500.0, 15.0}, {500.0, 10.0}, {100.0, 5.0}, {0.0, 2.0}};
    double lateral_deadband = 0.5;     ///< m/s
    double prograde_epsilon = 1e-9;    ///< m/s

    double target_speed(double range) const;
};

/// Throws DegenerateFrameError when the range is zero.
NavballReading compute_navball(const Observation& observation, double prograde_epsilon = 1e-9);

/// Lateral part of the pursuer's target-relative velocity (perpendicular to
/// the line of sight), RSW frame.
Vec3 lateral_drift(const Observation& observation);

/// The data-generation bot:
///  1. closing slower than the schedule -> burn along the dominant RSW axis of
///     the line of sight, toward the target;
///  2. otherwise, lateral drift above the deadband -> burn against its dominant axis;
///  3. otherwise coast.
VerbalAction navball_decide(const Observation& observation, const PursuitGains& gains = {});

}  // namespace orbitpe
