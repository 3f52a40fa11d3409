#include "orbitpe/episode_log.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>

namespace orbitpe {

StepRecord make_step_record(const Observation& decision, const StepResult& result, const ThrottleVector& action,
                            AgentRecord agent) {
    const Observation& o = result.observation;
    StepRecord rec;
    rec.t = o.mission_time;
    rec.pursuer_position = o.pursuer_position;
    rec.pursuer_velocity = o.pursuer_velocity;
    rec.evader_position = o.evader_position;
    rec.evader_velocity = o.evader_velocity;
    rec.range = o.range;
    rec.range_rate = o.range_rate;
    rec.action = action;
    rec.agent = std::move(agent);
    rec.decision = decision;
    return rec;
}

ClosestApproach closest_approach(const EpisodeLog& log) {
    if (log.steps.empty()) {
        throw DomainError("closest approach of an empty episode log");
    }
    ClosestApproach best{log.steps.front().range, log.steps.front().t, 0};
    for (std::size_t i = 1; i < log.steps.size(); ++i) {
        if (log.steps[i].range < best.distance) {
            best = {log.steps[i].range, log.steps[i].t, i};
        }
    }
    return best;
}

void to_json(json& j, const AgentRecord& a) {
    j = json{{"verbal", a.verbal}, {"rationale", a.rationale}, {"latency_ms", a.latency_ms}, {"failed", a.failed}};
    if (!a.failure.empty()) j["failure"] = a.failure;
    if (!a.prompt.empty()) j["prompt"] = a.prompt;
    if (!a.response.empty()) j["response"] = a.response;
}

void from_json(const json& j, AgentRecord& a) {
    j.at("verbal").get_to(a.verbal);
    j.at("rationale").get_to(a.rationale);
    j.at("latency_ms").get_to(a.latency_ms);
    j.at("failed").get_to(a.failed);
    a.failure = j.value("failure", std::string{});
    a.prompt = j.value("prompt", std::string{});
    a.response = j.value("response", std::string{});
}

void to_json(json& j, const StepRecord& s) {
    j = json{{"t", s.t},
             {"pursuer", {{"r", s.pursuer_position}, {"v", s.pursuer_velocity}}},
             {"evader", {{"r", s.evader_position}, {"v", s.evader_velocity}}},
             {"range", s.range},
             {"range_rate", s.range_rate},
             {"action", s.action},
             {"agent", s.agent},
             {"obs", s.decision}};
}

void from_json(const json& j, StepRecord& s) {
    j.at("t").get_to(s.t);
    j.at("pursuer").at("r").get_to(s.pursuer_position);
    j.at("pursuer").at("v").get_to(s.pursuer_velocity);
    j.at("evader").at("r").get_to(s.evader_position);
    j.at("evader").at("v").get_to(s.evader_velocity);
    j.at("range").get_to(s.range);
    j.at("range_rate").get_to(s.range_rate);
    j.at("action").get_to(s.action);
    j.at("agent").get_to(s.agent);
    j.at("obs").get_to(s.decision);
}

std::string to_jsonl(const EpisodeLog& log) {
    std::string out;
    for (const auto& step : log.steps) {
        out += json(step).dump();
        out += '\n';
    }
    return out;
}

EpisodeLog parse_jsonl(const std::string& text, std::string id) {
    EpisodeLog log;
    log.id = std::move(id);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            log.steps.push_back(json::parse(line).get<StepRecord>());
        } catch (const std::exception& e) {
            throw FormatError(fmt::format("episode log {} line {}: {}", log.id, line_no, e.what()));
        }
    }
    return log;
}

void write_episode_log(const std::filesystem::path& path, const EpisodeLog& log) {
    write_text_file(path, to_jsonl(log));
}

EpisodeLog read_episode_log(const std::filesystem::path& path) {
    EpisodeLog log = parse_jsonl(read_text_file(path), path.stem().string());
    // Logs written by the harness are named seed-<n>.jsonl.
    const std::string stem = path.stem().string();
    if (stem.rfind("seed-", 0) == 0) {
        try {
            log.seed = std::stoull(stem.substr(5));
        } catch (const std::exception&) {
        }
    }
    return log;
}

std::vector<EpisodeLog> read_episode_logs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (std::filesystem::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".jsonl") {
            files.push_back(it->path());
        }
    }
    if (ec) {
        throw IoError(fmt::format("cannot list episode logs in '{}': {}", dir.string(), ec.message()));
    }
    std::sort(files.begin(), files.end());
    std::vector<EpisodeLog> logs;
    logs.reserve(files.size());
    for (const auto& f : files) {
        logs.push_back(read_episode_log(f));
    }
    return logs;
}

std::string trajectory_csv(const EpisodeLog& log) {
    std::string out = "t,px,py,pz,ex,ey,ez\n";
    for (const auto& s : log.steps) {
        out += fmt::format("{},{},{},{},{},{},{}\n", s.t, s.pursuer_position.x(), s.pursuer_position.y(),
                           s.pursuer_position.z(), s.evader_position.x(), s.evader_position.y(),
                           s.evader_position.z());
    }
    return out;
}

}  // namespace orbitpe
