#include "orbitpe/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

namespace orbitpe {

EpisodeLog run_episode(const Scenario& scenario, Agent& agent, const EnvironmentConfig& env_config,
                       const RecordingOptions& recording) {
    Environment env(env_config);
    Observation obs = env.reset(scenario);

    EpisodeLog log;
    log.id = fmt::format("seed-{}", scenario.seed);
    log.seed = scenario.seed;
    log.steps.reserve(static_cast<std::size_t>(env.max_steps()));

    while (env.active()) {
        AgentDecision decision = agent.act(obs);
        if (!recording.transcripts) {
            decision.record.prompt.clear();
            decision.record.response.clear();
        }
        const ThrottleVector throttle = action_to_throttle(decision.action);
        const StepResult result = env.step(throttle);
        log.steps.push_back(make_step_record(obs, result, throttle, std::move(decision.record)));
        obs = result.observation;
    }
    return log;
}

EpisodeSummary summarize_episode(const EpisodeLog& log) {
    const ClosestApproach ca = closest_approach(log);
    EpisodeSummary s;
    s.seed = log.seed;
    s.closest_distance = ca.distance;
    s.time_of_closest = ca.time;
    s.turns = static_cast<long>(log.steps.size());
    for (const auto& step : log.steps) {
        s.failed_turns += step.agent.failed ? 1 : 0;
        s.latency_total_ms += step.agent.latency_ms;
    }
    return s;
}

EvaluationReport aggregate(std::string method_name, std::vector<EpisodeSummary> episodes) {
    if (episodes.empty()) {
        throw DomainError("cannot aggregate zero episodes");
    }
    EvaluationReport r;
    r.method_name = std::move(method_name);
    r.episode_count = static_cast<long>(episodes.size());
    r.best_distance = episodes.front().closest_distance;
    r.worst_distance = episodes.front().closest_distance;
    double distance_sum = 0.0;
    double latency_sum = 0.0;
    long turns = 0;
    long failed = 0;
    for (const auto& e : episodes) {
        r.best_distance = std::min(r.best_distance, e.closest_distance);
        r.worst_distance = std::max(r.worst_distance, e.closest_distance);
        distance_sum += e.closest_distance;
        latency_sum += e.latency_total_ms;
        turns += e.turns;
        failed += e.failed_turns;
    }
    r.average_distance = distance_sum / static_cast<double>(episodes.size());
    r.failure_rate = turns > 0 ? static_cast<double>(failed) / static_cast<double>(turns) : 0.0;
    r.average_latency_ms = turns > 0 ? latency_sum / static_cast<double>(turns) : 0.0;
    r.per_episode = std::move(episodes);
    return r;
}

EvaluationReport evaluate(const std::vector<Scenario>& scenarios, const AgentFactory& factory,
                          std::string method_name, int workers, const EnvironmentConfig& env_config,
                          std::vector<EpisodeLog>* logs) {
    if (scenarios.empty()) {
        throw DomainError("evaluate() needs at least one scenario");
    }
    const std::size_t n = scenarios.size();
    std::vector<std::optional<EpisodeLog>> results(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex error_mutex;
    std::optional<std::pair<std::size_t, std::string>> first_error;

    auto worker = [&] {
        for (std::size_t i = next++; i < n && !abort; i = next++) {
            try {
                auto agent = factory(scenarios[i]);
                results[i] = run_episode(scenarios[i], *agent, env_config);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!first_error || i < first_error->first) {
                    first_error = {i, e.what()};
                }
                abort = true;
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, static_cast<int>(n)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    if (first_error) {
        std::vector<EpisodeSummary> done;
        for (std::size_t i = 0; i < first_error->first; ++i) {
            if (results[i]) {
                done.push_back(summarize_episode(*results[i]));
            }
        }
        throw EvaluationError(fmt::format("episode {} (seed {}) failed: {}; {} earlier episodes completed",
                                          first_error->first, scenarios[first_error->first].seed,
                                          first_error->second, done.size()),
                              first_error->first, std::move(done));
    }

    std::vector<EpisodeSummary> summaries;
    summaries.reserve(n);
    for (auto& r : results) {
        summaries.push_back(summarize_episode(*r));
        if (logs != nullptr) {
            logs->push_back(std::move(*r));
        }
    }
    return aggregate(std::move(method_name), std::move(summaries));
}

ReportFormat report_format_from_string(std::string_view name) {
    if (name == "table") return ReportFormat::table;
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw DomainError(fmt::format("unknown report format '{}' (table, json, csv)", name));
}

void to_json(json& j, const EvaluationReport& r) {
    json episodes = json::array();
    for (const auto& e : r.per_episode) {
        episodes.push_back({{"seed", e.seed},
                            {"closest_distance", e.closest_distance},
                            {"time_of_closest", e.time_of_closest},
                            {"failed_turns", e.failed_turns},
                            {"turns", e.turns},
                            {"latency_total_ms", e.latency_total_ms}});
    }
    j = json{{"schema_version", kReportSchemaVersion},
             {"method_name", r.method_name},
             {"episode_count", r.episode_count},
             {"best_distance", r.best_distance},
             {"average_distance", r.average_distance},
             {"worst_distance", r.worst_distance},
             {"failure_rate", r.failure_rate},
             {"average_latency_ms", r.average_latency_ms},
             {"per_episode", std::move(episodes)}};
}

void from_json(const json& j, EvaluationReport& r) {
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
        throw FormatError(fmt::format("unsupported report schema version {}", version));
    }
    j.at("method_name").get_to(r.method_name);
    j.at("episode_count").get_to(r.episode_count);
    j.at("best_distance").get_to(r.best_distance);
    j.at("average_distance").get_to(r.average_distance);
    j.at("worst_distance").get_to(r.worst_distance);
    j.at("failure_rate").get_to(r.failure_rate);
    j.at("average_latency_ms").get_to(r.average_latency_ms);
    r.per_episode.clear();
    for (const auto& e : j.at("per_episode")) {
        EpisodeSummary s;
        e.at("seed").get_to(s.seed);
        e.at("closest_distance").get_to(s.closest_distance);
        e.at("time_of_closest").get_to(s.time_of_closest);
        e.at("failed_turns").get_to(s.failed_turns);
        e.at("turns").get_to(s.turns);
        e.at("latency_total_ms").get_to(s.latency_total_ms);
        r.per_episode.push_back(s);
    }
}

EvaluationReport parse_report_json(const std::string& text) {
    try {
        return json::parse(text).get<EvaluationReport>();
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("invalid evaluation report: {}", e.what()));
    }
}

std::string render_report(const EvaluationReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: return json(r).dump(2) + "\n";
        case ReportFormat::csv: {
            std::string out = "seed,closest_distance_m,time_of_closest_s,failed_turns,turns,latency_total_ms\n";
            for (const auto& e : r.per_episode) {
                out += fmt::format("{},{},{},{},{},{}\n", e.seed, e.closest_distance, e.time_of_closest,
                                   e.failed_turns, e.turns, e.latency_total_ms);
            }
            return out;
        }
        case ReportFormat::table: {
            const auto name_width = std::max<std::size_t>(r.method_name.size(), 6);
            std::string out;
            out += fmt::format("{:<{}} | {:>31} | {:>12} | {:>20}\n", "", name_width, "Distance (m)", "", "");
            out += fmt::format("{:<{}} | {:>9} {:>10} {:>10} | {:>12} | {:>20}\n", "Method", name_width, "Best",
                               "Average", "Worst", "Failure Rate", "Average Latency (ms)");
            out += std::string(name_width + 73, '-') + "\n";
            out += fmt::format("{:<{}} | {:>9.2f} {:>10.2f} {:>10.2f} | {:>11.2f}% | {:>20.2f}\n", r.method_name,
                               name_width, r.best_distance, r.average_distance, r.worst_distance,
                               100.0 * r.failure_rate, r.average_latency_ms);
            out += fmt::format("episodes: {}\n", r.episode_count);
            return out;
        }
    }
    return {};
}

}  // namespace orbitpe
