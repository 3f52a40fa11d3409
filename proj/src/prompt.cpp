#include "orbitpe/prompt.hpp"

#include <fmt/format.h>

#include <cmath>

namespace orbitpe {

namespace {

std::string triple(const Vec3& v) { return fmt::format("[{:.2f}, {:.2f}, {:.2f}]", v.x(), v.y(), v.z()); }

constexpr std::string_view kStrategyHint =
    "Strategy hint: the target is usually ahead along-track. Build up closing speed while far, "
    "slow the approach as the range shrinks, and cancel any sideways drift of the line of sight.\n";

std::string_view axis_phrase(VerbalAction action) {
    switch (action) {
        case VerbalAction::forward: return "along-track, toward +S";
        case VerbalAction::backward: return "along-track, toward -S";
        case VerbalAction::right: return "radial, toward +R";
        case VerbalAction::left: return "radial, toward -R";
        case VerbalAction::up: return "cross-track, toward +W";
        case VerbalAction::down: return "cross-track, toward -W";
        case VerbalAction::coast: return "none";
    }
    return "none";
}

}  // namespace

std::string_view to_string(PromptProfile profile) {
    return profile == PromptProfile::hinted ? "hinted" : "agnostic";
}

PromptProfile prompt_profile_from_string(std::string_view name) {
    if (name == "agnostic") return PromptProfile::agnostic;
    if (name == "hinted") return PromptProfile::hinted;
    throw DomainError(fmt::format("unknown prompt profile '{}' (expected agnostic or hinted)", name));
}

std::string serialize_prompt(const Observation& obs, const ContextWindow& window, PromptProfile profile) {
    std::string out;
    out.reserve(640);
    out += fmt::format("Mission time: {:.2f} s\n", obs.mission_time);
    out += fmt::format("Relative position (m, RSW): {}\n", triple(obs.relative_position));
    out += fmt::format("Relative velocity (m/s, RSW): {}\n", triple(obs.relative_velocity));
    out += fmt::format("Range: {:.2f} m\n", obs.range);
    out += fmt::format("Range rate: {:.2f} m/s\n", obs.range_rate);
    if (window.size() > 0) {
        out += "Previous actions (oldest first):\n";
        for (const auto& e : window.entries()) {
            out += fmt::format("- t={:.2f} s, range {:.2f} m: {}\n", e.mission_time, e.range, to_string(e.action));
        }
    }
    if (profile == PromptProfile::hinted) {
        out += kStrategyHint;
    }
    out += "Choose the next action.";
    return out;
}

std::string system_prompt(PromptProfile profile) {
    std::string out = fmt::format(
        "[{} {}] You pilot the pursuer spacecraft in an orbital rendezvous. Each turn you receive "
        "telemetry of the evader relative to you in your RSW frame (R radial out, S along-track, "
        "W orbit normal). Reply by calling perform_action with direction one of forward (+S), "
        "backward (-S), right (+R), left (-R), up (+W), down (-W) or coast, and explain your "
        "reasoning briefly in the message text. Goal: get as close as possible to the evader "
        "before the mission clock ends.",
        kPromptVersion, to_string(profile));
    if (profile == PromptProfile::hinted) {
        out += " Approach decisively when far away and gently when close.";
    }
    return out;
}

std::string action_rationale(const Observation& obs, VerbalAction action) {
    const double closing = -obs.range_rate;
    std::string trend;
    if (std::abs(closing) < 0.005) {
        trend = "holding range";
    } else if (closing > 0.0) {
        trend = fmt::format("closing at {:.2f} m/s", closing);
    } else {
        trend = fmt::format("opening at {:.2f} m/s", -closing);
    }
    std::string choice = action == VerbalAction::coast
                             ? std::string("Coasting: the approach is on schedule and drift is acceptable.")
                             : fmt::format("Thrusting {} ({}).", to_string(action), axis_phrase(action));
    return fmt::format("Range {:.2f} m, {}. Target offset {} m. {}", obs.range, trend, triple(obs.relative_position),
                       choice);
}

}  // namespace orbitpe
