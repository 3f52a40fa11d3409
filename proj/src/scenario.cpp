#include "orbitpe/scenario.hpp"

#include "orbitpe/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace orbitpe {

namespace {

/// Inclusive comparison with a sliver of slack for values built by adding
/// the limit to another angle.
bool within(double measured, double limit) {
    return measured <= limit + 1e-12 * std::max(1.0, std::abs(limit));
}

double separation(const OrbitalElements& pursuer, const OrbitalElements& evader, const BodyConstants& body) {
    return (elements_to_state(pursuer, body).position - elements_to_state(evader, body).position).norm();
}

/// Places the pursuer behind the evader (in argument of latitude) so the
/// initial range approximates `goal`. Returns nullopt when the perturbed
/// orbits are already farther apart than the goal at zero offset.
std::optional<double> solve_trailing_anomaly(OrbitalElements pursuer, const OrbitalElements& evader,
                                             const BodyConstants& body, double goal) {
    const double evader_latitude = evader.arg_periapsis + evader.true_anomaly;
    auto range_at = [&](double lag) {
        pursuer.true_anomaly = wrap_two_pi(evader_latitude - lag - pursuer.arg_periapsis);
        return separation(pursuer, evader, body) - goal;
    };

    double lo = 0.0;
    if (range_at(lo) > 0.0) {
        return std::nullopt;
    }
    double hi = 2.0 * goal / evader.semimajor_axis;
    while (range_at(hi) < 0.0) {
        hi *= 2.0;
        if (hi > std::numbers::pi) {
            return std::nullopt;
        }
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (range_at(mid) < 0.0 ? lo : hi) = mid;
    }
    return wrap_two_pi(evader_latitude - 0.5 * (lo + hi) - pursuer.arg_periapsis);
}

}  // namespace

void ScenarioConstraints::validate() const {
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(max_eccentricity) || max_eccentricity >= 1.0) {
        throw DomainError(fmt::format("max_eccentricity must lie in (0, 1), got {}", max_eccentricity));
    }
    if (!positive(max_inclination_delta)) {
        throw DomainError("max_inclination_delta must be positive");
    }
    if (!(max_initial_distance > 0.0)) {
        throw DomainError("max_initial_distance must be positive");
    }
    if (!positive(target_initial_distance) || target_initial_distance > max_initial_distance) {
        throw DomainError(fmt::format("target_initial_distance {} must be positive and <= max_initial_distance {}",
                                      target_initial_distance, max_initial_distance));
    }
    if (!positive(mission_duration)) {
        throw DomainError("mission_duration must be positive");
    }
}

bool ConstraintReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.passed; });
}

const ConstraintCheck* ConstraintReport::find(const std::string& name) const {
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const ConstraintCheck& c) { return c.name == name; });
    return it == checks.end() ? nullptr : &*it;
}

std::string ConstraintReport::failure_summary() const {
    std::string out;
    for (const auto& c : checks) {
        if (!c.passed) {
            out += fmt::format("{}: measured {} exceeds limit {}\n", c.name, c.measured, c.limit);
        }
    }
    return out;
}

OrbitalElements default_evader_elements(const BodyConstants& body) {
    OrbitalElements el;
    el.semimajor_axis = body.surface_radius + 150e3;
    el.eccentricity = 0.0;
    el.inclination = 0.1;
    return el;
}

double initial_separation(const Scenario& scenario) {
    return separation(scenario.pursuer, scenario.evader, scenario.body);
}

Scenario sample_scenario(const OrbitalElements& evader, const ScenarioConstraints& constraints, std::uint64_t seed,
                         const BodyConstants& body, const SamplingProfile& sampling) {
    body.validate();
    constraints.validate();
    evader.validate(body);

    Rng rng(seed);
    const double goal_lo = std::max(0.0, constraints.target_initial_distance - sampling.goal_half_width);
    const double goal_hi =
        std::min(constraints.target_initial_distance + sampling.goal_half_width, constraints.max_initial_distance);
    const double e_hi = std::min(sampling.eccentricity_span, constraints.max_eccentricity);
    const double di = std::min(sampling.inclination_span, constraints.max_inclination_delta);

    Scenario scenario;
    scenario.evader = evader;
    scenario.seed = seed;
    scenario.body = body;
    scenario.constraints = constraints;

    for (int attempt = 0; attempt < sampling.max_attempts; ++attempt) {
        // Draw every variate up front so the stream position per attempt is fixed.
        const double goal = rng.uniform(goal_lo, goal_hi);
        const double da = rng.uniform(-sampling.semimajor_axis_span, sampling.semimajor_axis_span);
        const double e = rng.uniform(0.0, e_hi);
        const double inc = rng.uniform(-di, di);

        OrbitalElements pursuer = evader;
        pursuer.semimajor_axis = evader.semimajor_axis + da;
        pursuer.eccentricity = e;
        pursuer.inclination = std::clamp(evader.inclination + inc, 0.0, std::numbers::pi);
        if (pursuer.semimajor_axis * (1.0 - e) <= body.surface_radius) {
            continue;
        }

        const auto anomaly = solve_trailing_anomaly(pursuer, evader, body, goal);
        if (!anomaly) {
            continue;
        }
        pursuer.true_anomaly = *anomaly;
        scenario.pursuer = pursuer;
        if (verify_constraints(scenario).all_passed()) {
            return scenario;
        }
    }
    throw GenerationFailure(fmt::format("no scenario satisfied the constraints within {} attempts (seed {})",
                                        sampling.max_attempts, seed));
}

ConstraintReport verify_constraints(const Scenario& s) {
    ConstraintReport report;
    const auto& c = s.constraints;

    const auto valid = [&](const OrbitalElements& el) {
        try {
            el.validate(s.body);
            return true;
        } catch (const DomainError&) {
            return false;
        }
    };
    const bool pursuer_valid = valid(s.pursuer);
    const bool evader_valid = valid(s.evader);
    report.checks.push_back({"pursuer_elements_valid", pursuer_valid, pursuer_valid ? 1.0 : 0.0, 1.0});
    report.checks.push_back({"evader_elements_valid", evader_valid, evader_valid ? 1.0 : 0.0, 1.0});

    double sep = std::numeric_limits<double>::infinity();
    if (pursuer_valid && evader_valid) {
        sep = initial_separation(s);
    }
    report.checks.push_back({"initial_separation", within(sep, c.max_initial_distance), sep, c.max_initial_distance});

    const double inc_delta = std::abs(s.pursuer.inclination - s.evader.inclination);
    report.checks.push_back(
        {"inclination_delta", within(inc_delta, c.max_inclination_delta), inc_delta, c.max_inclination_delta});
    report.checks.push_back(
        {"eccentricity", within(s.pursuer.eccentricity, c.max_eccentricity), s.pursuer.eccentricity, c.max_eccentricity});

    const double raan_delta = std::abs(s.pursuer.raan - s.evader.raan);
    report.checks.push_back({"raan_equal", s.pursuer.raan == s.evader.raan, raan_delta, 0.0});
    const double argp_delta = std::abs(s.pursuer.arg_periapsis - s.evader.arg_periapsis);
    report.checks.push_back(
        {"arg_periapsis_equal", s.pursuer.arg_periapsis == s.evader.arg_periapsis, argp_delta, 0.0});
    return report;
}

std::vector<Scenario> generate_batch(const OrbitalElements& evader, const ScenarioConstraints& constraints, int count,
                                     std::uint64_t master_seed, const BodyConstants& body,
                                     const SamplingProfile& sampling) {
    if (count < 1) {
        throw DomainError(fmt::format("batch count must be >= 1, got {}", count));
    }
    std::vector<Scenario> batch;
    batch.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        batch.push_back(sample_scenario(evader, constraints, split_seed(master_seed, static_cast<std::uint64_t>(i)),
                                        body, sampling));
    }
    return batch;
}

}  // namespace orbitpe
