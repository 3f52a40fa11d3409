#pragma once

#include "orbitpe/error.hpp"

#include <Eigen/Dense>

#include <limits>
#include <numbers>

namespace orbitpe {

using Vec3 = Eigen::Vector3d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Eccentricity / inclination below which the node or periapsis is undefined
/// and the conventions in state_to_elements() apply.
inline constexpr double kDegenerateTolerance = 1e-8;

/// Gravitational parameter and surface radius of the central body.
/// Defaults are Kerbin-like.
struct BodyConstants {
    double mu = 3.5316e12;          ///< m^3/s^2
    double surface_radius = 600e3;  ///< m

    void validate() const;
    bool operator==(const BodyConstants&) const = default;
};

/// Classical Keplerian elements. Lengths in metres, angles in radians.
struct OrbitalElements {
    double semimajor_axis = 0.0;
    double eccentricity = 0.0;
    double inclination = 0.0;
    double raan = 0.0;
    double arg_periapsis = 0.0;
    double true_anomaly = 0.0;

    /// Throws DomainError if the elements do not describe a bound orbit
    /// clearing the body's surface.
    void validate(const BodyConstants& body) const;
    bool operator==(const OrbitalElements&) const = default;
};

/// Inertial position/velocity at `epoch` seconds since mission start.
struct StateVector {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    double epoch = 0.0;

    bool operator==(const StateVector&) const = default;
};

/// Local orbital frame: radial (outward), along-track, cross-track.
struct RswBasis {
    Vec3 radial;
    Vec3 along_track;
    Vec3 cross_track;

    /// Components of an inertial vector in this frame.
    Vec3 to_local(const Vec3& inertial) const;
    /// Inertial vector from (radial, along-track, cross-track) components.
    Vec3 to_inertial(const Vec3& local) const;
};

/// The trajectory reached the body's surface during thrusted propagation.
class ImpactError : public Error {
public:
    ImpactError(const std::string& what, StateVector at_impact)
        : Error(what), state(std::move(at_impact)) {}

    StateVector state;
};

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle);

/// Signed smallest difference a - b, in (-pi, pi].
double angle_difference(double a, double b);

double orbital_period(double semimajor_axis, const BodyConstants& body);
double mean_motion(double semimajor_axis, const BodyConstants& body);

double true_to_eccentric_anomaly(double true_anomaly, double eccentricity);
double eccentric_to_true_anomaly(double eccentric_anomaly, double eccentricity);

/// Solves E - e sin(E) = M for the eccentric anomaly E in [0, 2*pi).
/// Newton iteration seeded at M + e sin(M), bisection fallback.
/// Throws DomainError for e outside [0, 1) or non-finite M.
double solve_kepler(double mean_anomaly, double eccentricity);

StateVector elements_to_state(const OrbitalElements& elements, const BodyConstants& body,
                              double epoch = 0.0);

/// Inverse of elements_to_state(). Degenerate conventions: for e < 1e-8 the
/// argument of periapsis is 0 and the anomaly is measured from the ascending
/// node; for an equatorial orbit the raan is 0 and the node line is +x.
/// Throws UnsupportedOrbitError for unbound or rectilinear states.
OrbitalElements state_to_elements(const StateVector& state, const BodyConstants& body);

/// Analytic two-body coast. Only the true anomaly changes.
OrbitalElements propagate_coast(const OrbitalElements& elements, double dt,
                                const BodyConstants& body);

/// Analytic coast of a state vector (through its elements).
StateVector propagate_coast(const StateVector& state, double dt, const BodyConstants& body);

/// Throws DegenerateFrameError when the angular momentum vanishes.
RswBasis rsw_basis(const StateVector& state);

/// Fixed-step RK4 integration of two-body gravity plus a constant commanded
/// acceleration given in the vessel's instantaneous RSW frame. The frame is
/// re-resolved at every stage evaluation. The step count is ceil(dt / substep)
/// so the final epoch is exactly `state.epoch + dt`.
///
/// Each RSW component must satisfy |a_i| <= max_axis_accel. Throws
/// ImpactError if the radius drops to the surface radius.
StateVector propagate_thrusted(const StateVector& state, const Vec3& accel_rsw, double dt,
                               double substep, const BodyConstants& body,
                               double max_axis_accel = std::numeric_limits<double>::infinity());

double specific_energy(const StateVector& state, const BodyConstants& body);
Vec3 angular_momentum(const StateVector& state);

/// Energy of `after` minus energy of `before`, arranged to avoid the
/// cancellation of subtracting two large specific energies.
double specific_energy_change(const StateVector& before, const StateVector& after,
                              const BodyConstants& body);

}  // namespace orbitpe
