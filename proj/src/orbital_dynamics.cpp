#include "orbitpe/orbital_dynamics.hpp"

#include <fmt/format.h>

#include <cmath>

namespace orbitpe {

namespace {

constexpr int kNewtonIterations = 50;

double kepler_residual(double E, double e, double M) { return E - e * std::sin(E) - M; }

bool finite(const Vec3& v) { return v.allFinite(); }

/// Angle from `from` to `to` measured counter-clockwise about `axis`.
double plane_angle(const Vec3& from, const Vec3& to, const Vec3& axis) {
    return wrap_two_pi(std::atan2(from.cross(to).dot(axis), from.dot(to)));
}

}  // namespace

void BodyConstants::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw DomainError(fmt::format("gravitational parameter must be positive, got {}", mu));
    }
    if (!(surface_radius > 0.0) || !std::isfinite(surface_radius)) {
        throw DomainError(fmt::format("surface radius must be positive, got {}", surface_radius));
    }
}

void OrbitalElements::validate(const BodyConstants& body) const {
    if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
        throw DomainError(fmt::format("eccentricity {} outside [0, 1)", eccentricity));
    }
    if (!(semimajor_axis > 0.0) || !std::isfinite(semimajor_axis)) {
        throw DomainError(fmt::format("semimajor axis {} must be positive", semimajor_axis));
    }
    if (!(inclination >= 0.0 && inclination <= std::numbers::pi)) {
        throw DomainError(fmt::format("inclination {} outside [0, pi]", inclination));
    }
    if (!std::isfinite(raan) || !std::isfinite(arg_periapsis) || !std::isfinite(true_anomaly)) {
        throw DomainError("orbital angles must be finite");
    }
    const double periapsis = semimajor_axis * (1.0 - eccentricity);
    if (!(periapsis > body.surface_radius)) {
        throw DomainError(fmt::format("periapsis radius {} m does not clear surface radius {} m",
                                      periapsis, body.surface_radius));
    }
}

Vec3 RswBasis::to_local(const Vec3& inertial) const {
    return {radial.dot(inertial), along_track.dot(inertial), cross_track.dot(inertial)};
}

Vec3 RswBasis::to_inertial(const Vec3& local) const {
    return local.x() * radial + local.y() * along_track + local.z() * cross_track;
}

double wrap_two_pi(double angle) {
    double wrapped = std::fmod(angle, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    // fmod of a tiny negative number can round up to exactly 2*pi.
    if (wrapped >= kTwoPi) {
        wrapped = 0.0;
    }
    return wrapped;
}

double angle_difference(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    if (d <= -std::numbers::pi) {
        d += kTwoPi;
    }
    return d;
}

double orbital_period(double semimajor_axis, const BodyConstants& body) {
    return kTwoPi * std::sqrt(semimajor_axis * semimajor_axis * semimajor_axis / body.mu);
}

double mean_motion(double semimajor_axis, const BodyConstants& body) {
    return std::sqrt(body.mu / (semimajor_axis * semimajor_axis * semimajor_axis));
}

double true_to_eccentric_anomaly(double true_anomaly, double eccentricity) {
    const double half = 0.5 * true_anomaly;
    return wrap_two_pi(2.0 * std::atan2(std::sqrt(1.0 - eccentricity) * std::sin(half),
                                        std::sqrt(1.0 + eccentricity) * std::cos(half)));
}

double eccentric_to_true_anomaly(double eccentric_anomaly, double eccentricity) {
    const double half = 0.5 * eccentric_anomaly;
    return wrap_two_pi(2.0 * std::atan2(std::sqrt(1.0 + eccentricity) * std::sin(half),
                                        std::sqrt(1.0 - eccentricity) * std::cos(half)));
}

double solve_kepler(double mean_anomaly, double eccentricity) {
    if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
        throw DomainError(fmt::format("Kepler solver requires 0 <= e < 1, got {}", eccentricity));
    }
    if (!std::isfinite(mean_anomaly)) {
        throw DomainError("mean anomaly must be finite");
    }
    const double M = wrap_two_pi(mean_anomaly);
    const double e = eccentricity;

    double E = M + e * std::sin(M);
    for (int i = 0; i < kNewtonIterations; ++i) {
        const double f = kepler_residual(E, e, M);
        const double step = f / (1.0 - e * std::cos(E));
        E -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(E))) {
            break;
        }
    }

    if (!std::isfinite(E) || std::abs(kepler_residual(E, e, M)) >= 1e-12) {
        // The root lies in [M - e, M + e] because E - M = e sin(E).
        double lo = M - e;
        double hi = M + e;
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) {
                break;
            }
            (kepler_residual(mid, e, M) < 0.0 ? lo : hi) = mid;
        }
        E = 0.5 * (lo + hi);
    }
    return wrap_two_pi(E);
}

StateVector elements_to_state(const OrbitalElements& el, const BodyConstants& body, double epoch) {
    el.validate(body);
    const double e = el.eccentricity;
    const double p = el.semimajor_axis * (1.0 - e * e);
    const double cos_nu = std::cos(el.true_anomaly);
    const double sin_nu = std::sin(el.true_anomaly);
    const double r = p / (1.0 + e * cos_nu);
    const double vs = std::sqrt(body.mu / p);

    const Vec3 r_pf{r * cos_nu, r * sin_nu, 0.0};
    const Vec3 v_pf{-vs * sin_nu, vs * (e + cos_nu), 0.0};

    // Perifocal to inertial: R3(-raan) R1(-i) R3(-argp).
    const Eigen::Matrix3d rotation =
        (Eigen::AngleAxisd(el.raan, Vec3::UnitZ()) * Eigen::AngleAxisd(el.inclination, Vec3::UnitX()) *
         Eigen::AngleAxisd(el.arg_periapsis, Vec3::UnitZ()))
            .toRotationMatrix();

    return StateVector{rotation * r_pf, rotation * v_pf, epoch};
}

OrbitalElements state_to_elements(const StateVector& state, const BodyConstants& body) {
    const Vec3& rv = state.position;
    const Vec3& vv = state.velocity;
    if (!finite(rv) || !finite(vv)) {
        throw UnsupportedOrbitError("state vector has non-finite components");
    }
    const double r = rv.norm();
    const double v2 = vv.squaredNorm();
    if (!(r > 0.0)) {
        throw UnsupportedOrbitError("position at the origin");
    }

    const Vec3 h = rv.cross(vv);
    const double h_norm = h.norm();
    if (h_norm <= 1e-12 * r * std::sqrt(v2) || h_norm == 0.0) {
        throw UnsupportedOrbitError("rectilinear (zero angular momentum) state");
    }

    const double energy = 0.5 * v2 - body.mu / r;
    if (!(energy < 0.0)) {
        throw UnsupportedOrbitError(fmt::format("unbound state (specific energy {} J/kg)", energy));
    }

    OrbitalElements el;
    el.semimajor_axis = -body.mu / (2.0 * energy);

    const Vec3 e_vec = ((v2 - body.mu / r) * rv - rv.dot(vv) * vv) / body.mu;
    el.eccentricity = e_vec.norm();
    if (el.eccentricity >= 1.0) {
        throw UnsupportedOrbitError(fmt::format("eccentricity {} is not elliptic", el.eccentricity));
    }

    const Vec3 h_hat = h / h_norm;
    const double h_xy = std::hypot(h.x(), h.y());
    el.inclination = std::atan2(h_xy, h.z());

    const bool equatorial = h_xy < kDegenerateTolerance * h_norm;
    const bool circular = el.eccentricity < kDegenerateTolerance;

    Vec3 node = Vec3::UnitX();
    if (!equatorial) {
        node = Vec3::UnitZ().cross(h);
        node.normalize();
        el.raan = wrap_two_pi(std::atan2(node.y(), node.x()));
    }

    if (circular) {
        el.arg_periapsis = 0.0;
        el.true_anomaly = plane_angle(node, rv, h_hat);
    } else {
        el.arg_periapsis = plane_angle(node, e_vec, h_hat);
        el.true_anomaly = plane_angle(e_vec, rv, h_hat);
    }
    return el;
}

OrbitalElements propagate_coast(const OrbitalElements& elements, double dt, const BodyConstants& body) {
    if (dt == 0.0) {
        return elements;
    }
    const double e = elements.eccentricity;
    const double E0 = true_to_eccentric_anomaly(elements.true_anomaly, e);
    const double M0 = E0 - e * std::sin(E0);
    // Reduce the advance first so long coasts keep precision.
    const double advance = std::fmod(mean_motion(elements.semimajor_axis, body) * dt, kTwoPi);
    const double E1 = solve_kepler(wrap_two_pi(M0 + advance), e);

    OrbitalElements out = elements;
    out.true_anomaly = eccentric_to_true_anomaly(E1, e);
    return out;
}

StateVector propagate_coast(const StateVector& state, double dt, const BodyConstants& body) {
    const OrbitalElements el = propagate_coast(state_to_elements(state, body), dt, body);
    return elements_to_state(el, body, state.epoch + dt);
}

RswBasis rsw_basis(const StateVector& state) {
    const Vec3 h = state.position.cross(state.velocity);
    const double h_norm = h.norm();
    const double r_norm = state.position.norm();
    if (!(r_norm > 0.0) || !(h_norm > 0.0) || !std::isfinite(h_norm)) {
        throw DegenerateFrameError("RSW frame undefined for zero angular momentum");
    }
    RswBasis basis;
    basis.radial = state.position / r_norm;
    basis.cross_track = h / h_norm;
    basis.along_track = basis.cross_track.cross(basis.radial);
    return basis;
}

namespace {

struct Derivative {
    Vec3 dr;
    Vec3 dv;
};

Derivative dynamics(const Vec3& r, const Vec3& v, const Vec3& accel_rsw, bool thrusting, double mu) {
    const double rn = r.norm();
    Vec3 a = -mu / (rn * rn * rn) * r;
    if (thrusting) {
        a += rsw_basis(StateVector{r, v, 0.0}).to_inertial(accel_rsw);
    }
    return {v, a};
}

}  // namespace

StateVector propagate_thrusted(const StateVector& state, const Vec3& accel_rsw, double dt, double substep,
                               const BodyConstants& body, double max_axis_accel) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError(fmt::format("propagation interval must be positive, got {}", dt));
    }
    if (!(substep > 0.0) || substep > dt) {
        throw DomainError(fmt::format("substep {} must lie in (0, dt={}]", substep, dt));
    }
    if (!accel_rsw.allFinite() || accel_rsw.cwiseAbs().maxCoeff() > max_axis_accel) {
        throw DomainError(fmt::format("commanded acceleration exceeds {} m/s^2 per axis", max_axis_accel));
    }

    const bool thrusting = !accel_rsw.isZero(0.0);
    // Tolerate dt/substep landing a hair above an integer.
    const auto steps = static_cast<long>(std::ceil(dt / substep - 1e-9));
    const double h = dt / static_cast<double>(steps);
    const double mu = body.mu;

    Vec3 r = state.position;
    Vec3 v = state.velocity;
    for (long i = 0; i < steps; ++i) {
        const Derivative k1 = dynamics(r, v, accel_rsw, thrusting, mu);
        const Derivative k2 = dynamics(r + 0.5 * h * k1.dr, v + 0.5 * h * k1.dv, accel_rsw, thrusting, mu);
        const Derivative k3 = dynamics(r + 0.5 * h * k2.dr, v + 0.5 * h * k2.dv, accel_rsw, thrusting, mu);
        const Derivative k4 = dynamics(r + h * k3.dr, v + h * k3.dv, accel_rsw, thrusting, mu);
        r += h / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
        v += h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);

        if (!finite(r) || !finite(v)) {
            throw DomainError("non-finite state during propagation");
        }
        if (r.norm() <= body.surface_radius) {
            const double t = state.epoch + h * static_cast<double>(i + 1);
            throw ImpactError(fmt::format("surface impact at t={:.1f} s", t), StateVector{r, v, t});
        }
    }
    return StateVector{r, v, state.epoch + dt};
}

double specific_energy(const StateVector& state, const BodyConstants& body) {
    return 0.5 * state.velocity.squaredNorm() - body.mu / state.position.norm();
}

Vec3 angular_momentum(const StateVector& state) { return state.position.cross(state.velocity); }

double specific_energy_change(const StateVector& before, const StateVector& after, const BodyConstants& body) {
    const double kinetic = 0.5 * (after.velocity - before.velocity).dot(after.velocity + before.velocity);
    const double r0 = before.position.norm();
    const double r1 = after.position.norm();
    const double dr = (after.position - before.position).dot(after.position + before.position) / (r0 + r1);
    return kinetic + body.mu * dr / (r0 * r1);
}

}  // namespace orbitpe
