#pragma once

#include "orbitpe/environment.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace orbitpe {

/// The pilot's verbal vocabulary. `coast` is the explicit no-op.
enum class VerbalAction { forward, backward, right, left, up, down, coast };

inline constexpr std::array<VerbalAction, 7> kAllVerbalActions{
    VerbalAction::forward, VerbalAction::backward, VerbalAction::right, VerbalAction::left,
    VerbalAction::up,      VerbalAction::down,     VerbalAction::coast};

std::string_view to_string(VerbalAction action);
std::optional<VerbalAction> verbal_action_from_string(std::string_view word);

/// forward/backward -> along-track +/-1, right/left -> radial +/-1,
/// up/down -> cross-track +/-1, coast -> zero.
ThrottleVector action_to_throttle(VerbalAction action);

/// Inverse of action_to_throttle for vectors with at most one nonzero axis.
std::optional<VerbalAction> throttle_to_action(const ThrottleVector& throttle);

}  // namespace orbitpe
