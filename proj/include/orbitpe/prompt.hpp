#pragma once

#include "orbitpe/actions.hpp"
#include "orbitpe/environment.hpp"

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>

namespace orbitpe {

/// Stamped into system prompts so logs and datasets record which text was used.
inline constexpr std::string_view kPromptVersion = "orbitpe-prompt/1";

/// agnostic: telemetry only. hinted: telemetry plus a strategy paragraph.
enum class PromptProfile { agnostic, hinted };

std::string_view to_string(PromptProfile profile);
/// Throws DomainError on an unknown name.
PromptProfile prompt_profile_from_string(std::string_view name);

struct WindowEntry {
    double mission_time = 0.0;
    double range = 0.0;
    VerbalAction action = VerbalAction::coast;

    bool operator==(const WindowEntry&) const = default;
};

/// Fixed-capacity FIFO of the most recent (observation summary, action) pairs.
/// Capacity 0 disables history.
class ContextWindow {
public:
    explicit ContextWindow(std::size_t capacity = 0) : capacity_(capacity) {}

    void push(const WindowEntry& entry) {
        if (capacity_ == 0) {
            return;
        }
        if (entries_.size() == capacity_) {
            entries_.pop_front();
        }
        entries_.push_back(entry);
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    const std::deque<WindowEntry>& entries() const { return entries_; }

private:
    std::size_t capacity_;
    std::deque<WindowEntry> entries_;
};

/// User prompt for one decision: mission time, RSW relative position and
/// velocity, range, range rate, then the window oldest-first. Two decimals
/// throughout; byte-identical for identical inputs.
std::string serialize_prompt(const Observation& observation, const ContextWindow& window,
                             PromptProfile profile = PromptProfile::agnostic);

std::string system_prompt(PromptProfile profile);

/// Templated chain-of-thought paragraph (range, closing trend, chosen axis)
/// accompanying `action` for this observation.
std::string action_rationale(const Observation& observation, VerbalAction action);

}  // namespace orbitpe
