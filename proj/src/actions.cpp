#include "orbitpe/actions.hpp"

namespace orbitpe {

std::string_view to_string(VerbalAction action) {
    switch (action) {
        case VerbalAction::forward: return "forward";
        case VerbalAction::backward: return "backward";
        case VerbalAction::right: return "right";
        case VerbalAction::left: return "left";
        case VerbalAction::up: return "up";
        case VerbalAction::down: return "down";
        case VerbalAction::coast: return "coast";
    }
    return "coast";
}

std::optional<VerbalAction> verbal_action_from_string(std::string_view word) {
    for (const VerbalAction a : kAllVerbalActions) {
        if (to_string(a) == word) {
            return a;
        }
    }
    return std::nullopt;
}

ThrottleVector action_to_throttle(VerbalAction action) {
    switch (action) {
        case VerbalAction::forward: return {0, 1, 0};
        case VerbalAction::backward: return {0, -1, 0};
        case VerbalAction::right: return {1, 0, 0};
        case VerbalAction::left: return {-1, 0, 0};
        case VerbalAction::up: return {0, 0, 1};
        case VerbalAction::down: return {0, 0, -1};
        case VerbalAction::coast: return {0, 0, 0};
    }
    return {};
}

std::optional<VerbalAction> throttle_to_action(const ThrottleVector& throttle) {
    for (const VerbalAction a : kAllVerbalActions) {
        if (action_to_throttle(a) == throttle) {
            return a;
        }
    }
    return std::nullopt;
}

}  // namespace orbitpe
