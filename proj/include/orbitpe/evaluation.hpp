#pragma once

#include "orbitpe/agent.hpp"
#include "orbitpe/episode_log.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace orbitpe {

inline constexpr int kReportSchemaVersion = 1;

struct RecordingOptions {
    bool transcripts = false;  ///< keep prompt/response text in each record
};

struct EpisodeSummary {
    std::uint64_t seed = 0;
    double closest_distance = 0.0;
    double time_of_closest = 0.0;
    long failed_turns = 0;
    long turns = 0;
    double latency_total_ms = 0.0;

    bool operator==(const EpisodeSummary&) const = default;
};

/// Best/average/worst closest approach over the episodes, plus the failure
/// rate (failed turns / all turns) and mean per-turn latency.
struct EvaluationReport {
    std::string method_name;
    double best_distance = 0.0;
    double average_distance = 0.0;
    double worst_distance = 0.0;
    double failure_rate = 0.0;
    double average_latency_ms = 0.0;
    long episode_count = 0;
    std::vector<EpisodeSummary> per_episode;

    bool operator==(const EvaluationReport&) const = default;
};

/// Thrown by evaluate() when an episode fails; carries what finished.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::size_t failed_index, std::vector<EpisodeSummary> completed)
        : Error(what), failed_index(failed_index), completed(std::move(completed)) {}

    std::size_t failed_index;
    std::vector<EpisodeSummary> completed;
};

/// Drives reset/step to termination, recording every turn.
EpisodeLog run_episode(const Scenario& scenario, Agent& agent, const EnvironmentConfig& env_config = {},
                       const RecordingOptions& recording = {});

EpisodeSummary summarize_episode(const EpisodeLog& log);

/// Folds episode summaries (in order) into a report. DomainError if empty.
EvaluationReport aggregate(std::string method_name, std::vector<EpisodeSummary> episodes);

/// Runs one episode per scenario on up to `workers` threads; aggregation is
/// ordered by scenario index. When `logs` is non-null it receives every log.
EvaluationReport evaluate(const std::vector<Scenario>& scenarios, const AgentFactory& factory,
                          std::string method_name, int workers = 1, const EnvironmentConfig& env_config = {},
                          std::vector<EpisodeLog>* logs = nullptr);

enum class ReportFormat { table, json, csv };
ReportFormat report_format_from_string(std::string_view name);

std::string render_report(const EvaluationReport& report, ReportFormat format);

void to_json(json& j, const EvaluationReport& r);
void from_json(const json& j, EvaluationReport& r);
/// FormatError on schema mismatch.
EvaluationReport parse_report_json(const std::string& text);

}  // namespace orbitpe
