#pragma once

#include "orbitpe/chat.hpp"
#include "orbitpe/episode_log.hpp"
#include "orbitpe/prompt.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace orbitpe {

struct MissionScore {
    double closest_distance = 0.0;  ///< m
    double time_of_closest = 0.0;   ///< s
    double approach_speed = 0.0;    ///< m/s, relative speed at closest approach

    bool operator==(const MissionScore&) const = default;
};

/// Secondary ordering after closest distance: time of closest approach
/// (earlier first) or relative speed there (slower first).
enum class TieBreak { time, speed };
TieBreak tie_break_from_string(std::string_view name);

/// Throws DomainError on an empty log.
MissionScore score_mission(const EpisodeLog& log);

/// The k best missions: ascending closest distance, then the tie-break key,
/// then log id. Throws DomainError unless 1 <= k <= logs.size().
std::vector<EpisodeLog> select_top_k(std::vector<EpisodeLog> logs, int k, TieBreak tie_break = TieBreak::time);

/// System prompt, user prompt (with the reconstructed window), and the
/// assistant's perform_action call with a templated rationale.
struct TrainingExample {
    std::vector<ChatMessage> messages;

    bool operator==(const TrainingExample&) const = default;
};

/// One example per successful decision step; failed turns are skipped but
/// still occupy their slot in later windows, as they did at run time.
/// Throws FormatError if a step lacks a valid verbal action.
std::vector<TrainingExample> log_to_examples(const EpisodeLog& log, std::size_t window_capacity,
                                             PromptProfile profile = PromptProfile::agnostic);

std::string examples_to_jsonl(const std::vector<TrainingExample>& examples);
std::vector<TrainingExample> examples_from_jsonl(const std::string& text);

/// IoError with the path on failure.
void export_jsonl(const std::vector<TrainingExample>& examples, const std::filesystem::path& destination);
std::vector<TrainingExample> import_jsonl(const std::filesystem::path& source);

}  // namespace orbitpe
