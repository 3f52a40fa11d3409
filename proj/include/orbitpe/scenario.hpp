#pragma once

#include "orbitpe/orbital_dynamics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace orbitpe {

inline constexpr double kDegree = std::numbers::pi / 180.0;

/// Limits every generated pursuer/evader pair must respect.
struct ScenarioConstraints {
    double max_eccentricity = 0.1;
    double max_inclination_delta = 5.0 * kDegree;  ///< rad
    double max_initial_distance = 3000.0;           ///< m
    double target_initial_distance = 2700.0;        ///< m
    double mission_duration = 240.0;                ///< s

    void validate() const;
    bool operator==(const ScenarioConstraints&) const = default;
};

/// How the randomized degrees of freedom are drawn inside the constraints.
///
/// A separation goal is drawn uniformly in
/// [target - goal_half_width, min(target + goal_half_width, max_initial_distance)].
/// The pursuer's semimajor axis, eccentricity and inclination are perturbed
/// uniformly within the spans below (clamped to the constraints), and its
/// true anomaly is then solved so that it trails the evader at the goal range.
struct SamplingProfile {
    double goal_half_width = 500.0;           ///< m
    double semimajor_axis_span = 100.0;       ///< m, +/-
    double eccentricity_span = 5e-4;          ///< pursuer e drawn in [0, span]
    double inclination_span = 0.02 * kDegree; ///< rad, +/-
    int max_attempts = 10'000;
};

struct Scenario {
    OrbitalElements pursuer;
    OrbitalElements evader;
    std::uint64_t seed = 0;
    BodyConstants body;
    ScenarioConstraints constraints;

    bool operator==(const Scenario&) const = default;
};

struct ConstraintCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double limit = 0.0;
};

struct ConstraintReport {
    std::vector<ConstraintCheck> checks;

    bool all_passed() const;
    const ConstraintCheck* find(const std::string& name) const;
    /// One line per failing check, empty when everything passed.
    std::string failure_summary() const;
};

/// Circular orbit 150 km above the default body, inclined 0.1 rad.
OrbitalElements default_evader_elements(const BodyConstants& body = {});

/// Initial pursuer-evader distance of a scenario, in metres.
double initial_separation(const Scenario& scenario);

/// Draws one pursuer orbit for `evader`. Deterministic in `seed`.
/// Throws GenerationFailure after `sampling.max_attempts` rejections.
Scenario sample_scenario(const OrbitalElements& evader, const ScenarioConstraints& constraints,
                         std::uint64_t seed, const BodyConstants& body = {},
                         const SamplingProfile& sampling = {});

/// Evaluates every scenario invariant independently.
ConstraintReport verify_constraints(const Scenario& scenario);

/// `count` scenarios; item i uses split_seed(master_seed, i).
std::vector<Scenario> generate_batch(const OrbitalElements& evader, const ScenarioConstraints& constraints,
                                     int count, std::uint64_t master_seed, const BodyConstants& body = {},
                                     const SamplingProfile& sampling = {});

}  // namespace orbitpe
