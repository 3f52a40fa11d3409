#include "orbitpe/navball_agent.hpp"

namespace orbitpe {

namespace {

/// Verbal action pushing along `axis` (0 radial, 1 along-track, 2 cross-track)
/// with the given sign.
VerbalAction axis_action(Eigen::Index axis, double sign) {
    ThrottleVector t;
    const int s = sign >= 0.0 ? 1 : -1;
    if (axis == 0) t.radial = s;
    if (axis == 1) t.along_track = s;
    if (axis == 2) t.cross_track = s;
    return throttle_to_action(t).value_or(VerbalAction::coast);
}

}  // namespace

double PursuitGains::target_speed(double range) const {
    for (const auto& stage : schedule) {
        if (range > stage.above_range) {
            return stage.speed;
        }
    }
    return schedule.empty() ? 0.0 : schedule.back().speed;
}

NavballReading compute_navball(const Observation& obs, double prograde_epsilon) {
    const double range = obs.relative_position.norm();
    if (!(range > 0.0)) {
        throw DegenerateFrameError("navball target direction undefined at zero range");
    }
    NavballReading reading;
    reading.range = obs.range;
    reading.target_direction = obs.relative_position / range;
    const Vec3 own = -obs.relative_velocity;
    const double speed = own.norm();
    reading.prograde_defined = speed > prograde_epsilon;
    if (reading.prograde_defined) {
        reading.target_prograde = own / speed;
    }
    reading.closing_speed = -obs.range_rate;
    return reading;
}

Vec3 lateral_drift(const Observation& obs) {
    const Vec3 los = obs.relative_position.normalized();
    const Vec3 own = -obs.relative_velocity;
    return own - own.dot(los) * los;
}

VerbalAction navball_decide(const Observation& obs, const PursuitGains& gains) {
    const NavballReading nav = compute_navball(obs, gains.prograde_epsilon);

    if (nav.closing_speed < gains.target_speed(nav.range)) {
        Eigen::Index axis = 0;
        nav.target_direction.cwiseAbs().maxCoeff(&axis);
        return axis_action(axis, nav.target_direction[axis]);
    }

    const Vec3 lateral = lateral_drift(obs);
    if (lateral.norm() > gains.lateral_deadband) {
        Eigen::Index axis = 0;
        lateral.cwiseAbs().maxCoeff(&axis);
        return axis_action(axis, -lateral[axis]);
    }
    return VerbalAction::coast;
}

}  // namespace orbitpe
