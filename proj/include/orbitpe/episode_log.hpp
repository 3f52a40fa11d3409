#pragma once

#include "orbitpe/environment.hpp"
#include "orbitpe/json_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace orbitpe {

/// What the agent said for one decision.
struct AgentRecord {
    std::string verbal;     ///< one of the seven action words
    std::string rationale;
    double latency_ms = 0.0;
    bool failed = false;
    std::string failure;    ///< failure category, empty on success
    std::string prompt;     ///< only kept when transcripts are recorded
    std::string response;

    bool operator==(const AgentRecord&) const = default;
};

/// One decision step. `decision` is the observation the agent acted on;
/// the remaining fields describe the state after the step.
struct StepRecord {
    double t = 0.0;
    Vec3 pursuer_position = Vec3::Zero();
    Vec3 pursuer_velocity = Vec3::Zero();
    Vec3 evader_position = Vec3::Zero();
    Vec3 evader_velocity = Vec3::Zero();
    double range = 0.0;
    double range_rate = 0.0;
    ThrottleVector action;
    AgentRecord agent;
    Observation decision;

    bool operator==(const StepRecord&) const = default;
};

struct EpisodeLog {
    std::string id;          ///< file stem or "seed-<n>"
    std::uint64_t seed = 0;  ///< scenario seed when known
    std::vector<StepRecord> steps;

    bool empty() const { return steps.empty(); }
};

struct ClosestApproach {
    double distance = 0.0;
    double time = 0.0;
    std::size_t index = 0;
};

StepRecord make_step_record(const Observation& decision, const StepResult& result, const ThrottleVector& action,
                            AgentRecord agent);

/// Minimum recorded range and its time; ties go to the earliest sample.
/// Throws DomainError on an empty log.
ClosestApproach closest_approach(const EpisodeLog& log);

void to_json(json& j, const AgentRecord& a);
void from_json(const json& j, AgentRecord& a);
void to_json(json& j, const StepRecord& s);
void from_json(const json& j, StepRecord& s);

/// One JSON object per line, one line per step.
std::string to_jsonl(const EpisodeLog& log);
/// FormatError names the offending line.
EpisodeLog parse_jsonl(const std::string& text, std::string id = {});

void write_episode_log(const std::filesystem::path& path, const EpisodeLog& log);
/// The log id becomes the file stem.
EpisodeLog read_episode_log(const std::filesystem::path& path);
/// Every *.jsonl file in `dir`, sorted by file name.
std::vector<EpisodeLog> read_episode_logs(const std::filesystem::path& dir);

/// CSV with header t,px,py,pz,ex,ey,ez (inertial metres) for 3D plotting.
std::string trajectory_csv(const EpisodeLog& log);

}  // namespace orbitpe
