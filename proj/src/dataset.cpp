#include "orbitpe/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>
#include <tuple>

namespace orbitpe {

TieBreak tie_break_from_string(std::string_view name) {
    if (name == "time") return TieBreak::time;
    if (name == "speed") return TieBreak::speed;
    throw DomainError(fmt::format("unknown tie-break '{}' (time or speed)", name));
}

MissionScore score_mission(const EpisodeLog& log) {
    const ClosestApproach ca = closest_approach(log);
    const StepRecord& at = log.steps[ca.index];
    return MissionScore{ca.distance, ca.time, (at.evader_velocity - at.pursuer_velocity).norm()};
}

std::vector<EpisodeLog> select_top_k(std::vector<EpisodeLog> logs, int k, TieBreak tie_break) {
    if (k < 1 || static_cast<std::size_t>(k) > logs.size()) {
        throw DomainError(fmt::format("top-k must lie in [1, {}], got {}", logs.size(), k));
    }
    struct Keyed {
        MissionScore score;
        std::size_t index;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        keyed.push_back({score_mission(logs[i]), i});
    }
    const auto secondary = [tie_break](const MissionScore& s) {
        return tie_break == TieBreak::time ? s.time_of_closest : s.approach_speed;
    };
    std::stable_sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
        return std::forward_as_tuple(a.score.closest_distance, secondary(a.score), logs[a.index].id) <
               std::forward_as_tuple(b.score.closest_distance, secondary(b.score), logs[b.index].id);
    });

    std::vector<EpisodeLog> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        out.push_back(std::move(logs[keyed[static_cast<std::size_t>(i)].index]));
    }
    return out;
}

std::vector<TrainingExample> log_to_examples(const EpisodeLog& log, std::size_t window_capacity,
                                             PromptProfile profile) {
    const std::string system = system_prompt(profile);
    ContextWindow window(window_capacity);
    std::vector<TrainingExample> examples;
    examples.reserve(log.steps.size());

    for (std::size_t i = 0; i < log.steps.size(); ++i) {
        const StepRecord& step = log.steps[i];
        const auto action = verbal_action_from_string(step.agent.verbal);
        if (!action) {
            throw FormatError(
                fmt::format("episode {} step {}: missing or invalid verbal action '{}'", log.id, i, step.agent.verbal));
        }
        if (!step.agent.failed) {
            TrainingExample ex;
            ex.messages.push_back({"system", system, {}});
            ex.messages.push_back({"user", serialize_prompt(step.decision, window, profile), {}});
            ex.messages.push_back(render_action(*action, action_rationale(step.decision, *action),
                                                ArgumentForm::verbal, fmt::format("call_{}", i)));
            examples.push_back(std::move(ex));
        }
        window.push({step.decision.mission_time, step.decision.range, *action});
    }
    return examples;
}

std::string examples_to_jsonl(const std::vector<TrainingExample>& examples) {
    std::string out;
    for (const auto& ex : examples) {
        out += json{{"messages", ex.messages}}.dump();
        out += '\n';
    }
    return out;
}

std::vector<TrainingExample> examples_from_jsonl(const std::string& text) {
    std::vector<TrainingExample> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            TrainingExample ex;
            json::parse(line).at("messages").get_to(ex.messages);
            out.push_back(std::move(ex));
        } catch (const json::exception& e) {
            throw FormatError(fmt::format("dataset line {}: {}", line_no, e.what()));
        }
    }
    return out;
}

void export_jsonl(const std::vector<TrainingExample>& examples, const std::filesystem::path& destination) {
    write_text_file(destination, examples_to_jsonl(examples));
}

std::vector<TrainingExample> import_jsonl(const std::filesystem::path& source) {
    return examples_from_jsonl(read_text_file(source));
}

}  // namespace orbitpe
