#include "cli.hpp"

#include "orbitpe/agent.hpp"
#include "orbitpe/dataset.hpp"
#include "orbitpe/evaluation.hpp"
#include "orbitpe/json_io.hpp"
#include "orbitpe/scripted_backend.hpp"
#include "orbitpe/session_service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <memory>
#include <optional>
#include <ostream>

namespace orbitpe::cli {

namespace {

namespace fs = std::filesystem;

struct AgentOptions {
    std::string kind = "navball";
    std::string endpoint = "http://127.0.0.1:8000";
    std::string model = "orbitpe-pilot";
    std::string api_key;
    double timeout_s = 30.0;
    std::size_t window = 0;
    std::string profile = "agnostic";
    bool transcripts = false;
};

void add_agent_options(CLI::App& sub, AgentOptions& o) {
    sub.add_option("--agent", o.kind, "Pilot: navball, llm, or coast")
        ->check(CLI::IsMember({"navball", "llm", "coast"}))
        ->capture_default_str();
    sub.add_option("--endpoint", o.endpoint, "OpenAI-compatible server for --agent llm")->capture_default_str();
    sub.add_option("--model", o.model, "Model name sent to the endpoint")->capture_default_str();
    sub.add_option("--api-key", o.api_key, "Bearer token for the endpoint");
    sub.add_option("--timeout", o.timeout_s, "Per-request timeout in seconds")->capture_default_str();
    sub.add_option("--window", o.window, "Previous actions shown in each prompt")->capture_default_str();
    sub.add_option("--profile", o.profile, "Prompt profile: agnostic or hinted")
        ->check(CLI::IsMember({"agnostic", "hinted"}))
        ->capture_default_str();
    sub.add_flag("--transcripts", o.transcripts, "Keep prompt and response text in the logs");
}

/// Owns whatever the agents borrow (the HTTP client).
struct AgentSetup {
    std::unique_ptr<ChatBackend> backend;
    AgentFactory factory;
};

AgentSetup make_agents(const AgentOptions& o) {
    AgentSetup setup;
    if (o.kind == "navball") {
        setup.factory = navball_agent_factory();
    } else if (o.kind == "coast") {
        setup.factory = coast_agent_factory();
    } else {
        if (!(o.timeout_s > 0.0)) {
            throw DomainError(fmt::format("--timeout must be positive, got {}", o.timeout_s));
        }
        setup.backend = std::make_unique<HttpChatClient>(EndpointConfig{o.endpoint, o.model, o.api_key, o.timeout_s});
        LlmAgentConfig cfg;
        cfg.model = o.model;
        cfg.window_capacity = o.window;
        cfg.profile = prompt_profile_from_string(o.profile);
        cfg.record_transcripts = o.transcripts;
        setup.factory = llm_agent_factory(*setup.backend, cfg);
    }
    return setup;
}

std::vector<Scenario> load_scenarios(const fs::path& path) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        auto scenarios = read_scenario_dir(path);
        if (scenarios.empty()) {
            throw IoError(fmt::format("no *.json scenarios in {}", path.string()));
        }
        return scenarios;
    }
    return read_scenarios(path);
}

std::string env_key(const std::string& option) {
    std::string key = "ORBITPE_";
    for (char c : option) {
        key += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return key;
}

std::optional<std::string> config_value(const json& config, const std::string& section, const std::string& name) {
    const json* found = nullptr;
    if (config.contains(section) && config[section].is_object() && config[section].contains(name)) {
        found = &config[section][name];
    } else if (config.contains(name) && !config[name].is_object()) {
        found = &config[name];
    }
    if (found == nullptr) {
        return std::nullopt;
    }
    if (found->is_string()) {
        return found->get<std::string>();
    }
    return found->dump();
}

/// Fills options the user did not pass, from the environment and then the
/// config file.
void fill_unset(CLI::App& sub, const json& config) {
    for (CLI::Option* opt : sub.get_options()) {
        if (opt->count() > 0 || opt->get_lnames().empty()) {
            continue;
        }
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config") {
            continue;
        }
        std::optional<std::string> value;
        if (const char* env = std::getenv(env_key(name).c_str()); env != nullptr && *env != '\0') {
            value = env;
        } else {
            value = config_value(config, sub.get_name(), name);
        }
        if (value) {
            try {
                opt->add_result(*value);
                opt->run_callback();
            } catch (const CLI::Error& e) {
                throw DomainError(fmt::format("--{}: {}", name, e.what()));
            }
        }
    }
}

json load_config(const std::string& path) {
    if (path.empty()) {
        return json::object();
    }
    try {
        json config = json::parse(read_text_file(path));
        if (!config.is_object()) {
            throw FormatError(fmt::format("config file {} must hold a JSON object", path));
        }
        return config;
    } catch (const json::parse_error& e) {
        throw FormatError(fmt::format("config file {}: {}", path, e.what()));
    }
}

/// Blocks SIGINT/SIGTERM for this thread and every thread started after it,
/// so they can be collected with sigwait.
sigset_t block_shutdown_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    return set;
}

int wait_for_shutdown(const sigset_t& set) {
    int sig = 0;
    sigwait(&set, &sig);
    return sig;
}

std::string format_distance_range(const std::vector<double>& d) {
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    return fmt::format("{:.2f}..{:.2f} m", *lo, *hi);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"orbitpe: orbital pursuit-evasion scenarios, pilots, datasets and evaluation", "orbitpe"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with option defaults")->envname("ORBITPE_CONFIG");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a batch of constraint-valid scenario files");
    int gen_count = 100;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    ScenarioConstraints limits;
    double max_inclination_deg = limits.max_inclination_delta / kDegree;
    int max_attempts = SamplingProfile{}.max_attempts;
    gen->add_option("--count", gen_count, "Number of scenarios")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory (required)");
    gen->add_option("--max-eccentricity", limits.max_eccentricity)->capture_default_str();
    gen->add_option("--max-inclination-delta", max_inclination_deg, "Degrees")->capture_default_str();
    gen->add_option("--max-distance", limits.max_initial_distance, "Metres")->capture_default_str();
    gen->add_option("--target-distance", limits.target_initial_distance, "Metres")->capture_default_str();
    gen->add_option("--duration", limits.mission_duration, "Mission length in seconds")->capture_default_str();
    gen->add_option("--max-attempts", max_attempts, "Sampling attempts per scenario")->capture_default_str();

    // run
    auto* run_cmd = app.add_subcommand("run", "Fly one or more scenarios and record episode logs");
    std::string run_scenario;
    std::optional<std::uint64_t> run_seed;
    std::string run_record = "logs";
    AgentOptions run_agent;
    run_cmd->add_option("--scenario", run_scenario, "Scenario file (object or array)");
    run_cmd->add_option("--seed", run_seed, "Generate the scenario from this seed instead of a file");
    add_agent_options(*run_cmd, run_agent);
    run_cmd->add_option("--record", run_record, "Directory for seed-<n>.jsonl logs")->capture_default_str();

    // dataset
    auto* ds = app.add_subcommand("dataset", "Build a fine-tuning JSONL file from the best episode logs");
    std::string ds_logs;
    int ds_top_k = 50;
    std::size_t ds_window = 0;
    std::string ds_profile = "agnostic";
    std::string ds_tie = "time";
    std::string ds_out;
    ds->add_option("--logs", ds_logs, "Directory of *.jsonl episode logs (required)");
    ds->add_option("--top-k", ds_top_k, "Episodes to keep")->capture_default_str();
    ds->add_option("--window", ds_window, "Previous actions shown in each prompt")->capture_default_str();
    ds->add_option("--profile", ds_profile)->check(CLI::IsMember({"agnostic", "hinted"}))->capture_default_str();
    ds->add_option("--tie-break", ds_tie, "time or speed")
        ->check(CLI::IsMember({"time", "speed"}))
        ->capture_default_str();
    ds->add_option("--out", ds_out, "Output JSONL file (required)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Score a pilot over a scenario set");
    std::string ev_scenarios;
    int ev_workers = 1;
    std::string ev_format = "table";
    std::string ev_name;
    std::string ev_record;
    std::string ev_out;
    AgentOptions ev_agent;
    ev->add_option("--scenarios", ev_scenarios, "Scenario directory or batch file (required)");
    add_agent_options(*ev, ev_agent);
    ev->add_option("--workers", ev_workers, "Parallel episodes")->capture_default_str();
    ev->add_option("--format", ev_format)->check(CLI::IsMember({"table", "json", "csv"}))->capture_default_str();
    ev->add_option("--name", ev_name, "Method name in the report (defaults to the agent)");
    ev->add_option("--record", ev_record, "Also write every episode log here");
    ev->add_option("--out", ev_out, "Write the report to a file instead of stdout");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP session service until interrupted");
    std::string serve_host = "127.0.0.1";
    int serve_port = 8080;
    double idle_timeout = 600.0;
    std::string record_dir;
    serve->add_option("--host", serve_host)->capture_default_str();
    serve->add_option("--port", serve_port, "0 picks a free port")->capture_default_str();
    serve->add_option("--idle-timeout", idle_timeout, "Seconds before an idle session is dropped")
        ->capture_default_str();
    serve->add_option("--record-dir", record_dir, "Write each session's log here");

    // mock-llm
    auto* mock = app.add_subcommand("mock-llm", "Serve a scripted chat model that wraps a built-in policy");
    std::string mock_host = "127.0.0.1";
    int mock_port = 8000;
    std::string mock_policy = "navball";
    ScriptedBackendConfig mock_cfg;
    mock->add_option("--host", mock_host)->capture_default_str();
    mock->add_option("--port", mock_port, "0 picks a free port")->capture_default_str();
    mock->add_option("--policy", mock_policy)->check(CLI::IsMember({"navball", "coast"}))->capture_default_str();
    mock->add_option("--failure-rate", mock_cfg.failure_rate, "Probability of a reply without a tool call")
        ->capture_default_str();
    mock->add_option("--seed", mock_cfg.seed)->capture_default_str();
    mock->add_option("--latency-ms", mock_cfg.latency.base_ms)->capture_default_str();
    mock->add_option("--jitter-ms", mock_cfg.latency.jitter_ms)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const auto fail = [&err](const std::string& message, int code) {
        err << "orbitpe: " << message << "\n";
        return code;
    };

    try {
        const json config = load_config(config_path);
        CLI::App* sub = app.get_subcommands().front();
        fill_unset(*sub, config);

        if (sub == gen) {
            if (gen_out.empty()) {
                return fail("generate: --out is required", kUsage);
            }
            limits.max_inclination_delta = max_inclination_deg * kDegree;
            SamplingProfile sampling;
            sampling.max_attempts = max_attempts;
            std::vector<Scenario> batch;
            try {
                limits.validate();
                batch = generate_batch(default_evader_elements(), limits, gen_count, gen_seed, {}, sampling);
            } catch (const DomainError& e) {
                throw GenerationFailure(e.what());
            }
            const int width = std::max<int>(3, static_cast<int>(std::to_string(batch.size() - 1).size()));
            std::vector<double> separation;
            std::size_t valid = 0;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                write_scenario(fs::path(gen_out) / fmt::format("scenario-{:0{}}.json", i, width), batch[i]);
                separation.push_back(initial_separation(batch[i]));
                valid += verify_constraints(batch[i]).all_passed() ? 1 : 0;
            }
            out << fmt::format("generated {} scenarios (seed {}) in {}\n", batch.size(), gen_seed, gen_out);
            out << fmt::format("constraint report: {}/{} passed; initial separation {}\n", valid, batch.size(),
                               format_distance_range(separation));
            return valid == batch.size() ? kOk : kGenerationFailure;
        }

        if (sub == run_cmd) {
            std::vector<Scenario> scenarios;
            if (!run_scenario.empty()) {
                scenarios = load_scenarios(run_scenario);
            } else if (run_seed) {
                scenarios.push_back(sample_scenario(default_evader_elements(), {}, *run_seed));
            } else {
                return fail("run: give --scenario or --seed", kUsage);
            }
            AgentSetup agents = make_agents(run_agent);
            const RecordingOptions recording{run_agent.transcripts};
            for (const auto& scenario : scenarios) {
                EpisodeLog log;
                try {
                    auto agent = agents.factory(scenario);
                    log = run_episode(scenario, *agent, {}, recording);
                } catch (const IoError&) {
                    throw;
                } catch (const Error& e) {
                    return fail(fmt::format("episode seed {} failed: {}", scenario.seed, e.what()),
                                kEvaluationFailure);
                }
                const EpisodeSummary s = summarize_episode(log);
                const fs::path path = fs::path(run_record) / (log.id + ".jsonl");
                write_episode_log(path, log);
                out << fmt::format("{}: closest approach {:.2f} m at t={:.1f} s; {} turns, {} failed; log {}\n",
                                   log.id, s.closest_distance, s.time_of_closest, s.turns, s.failed_turns,
                                   path.string());
            }
            return kOk;
        }

        if (sub == ds) {
            if (ds_logs.empty() || ds_out.empty()) {
                return fail("dataset: --logs and --out are required", kUsage);
            }
            auto logs = read_episode_logs(ds_logs);
            if (logs.empty()) {
                throw IoError(fmt::format("no *.jsonl episode logs in {}", ds_logs));
            }
            const std::size_t total = logs.size();
            const auto best = select_top_k(std::move(logs), ds_top_k, tie_break_from_string(ds_tie));
            std::vector<TrainingExample> examples;
            std::vector<double> distances;
            for (const auto& log : best) {
                distances.push_back(score_mission(log).closest_distance);
                auto more = log_to_examples(log, ds_window, prompt_profile_from_string(ds_profile));
                examples.insert(examples.end(), std::make_move_iterator(more.begin()),
                                std::make_move_iterator(more.end()));
            }
            export_jsonl(examples, ds_out);
            out << fmt::format("selected {} of {} episodes (closest approach {}); wrote {} examples to {}\n",
                               best.size(), total, format_distance_range(distances), examples.size(), ds_out);
            return kOk;
        }

        if (sub == ev) {
            if (ev_scenarios.empty()) {
                return fail("evaluate: --scenarios is required", kUsage);
            }
            if (ev_workers < 1) {
                return fail(fmt::format("evaluate: --workers must be >= 1, got {}", ev_workers), kUsage);
            }
            const auto scenarios = load_scenarios(ev_scenarios);
            AgentSetup agents = make_agents(ev_agent);
            std::vector<EpisodeLog> logs;
            const EvaluationReport report =
                evaluate(scenarios, agents.factory, ev_name.empty() ? ev_agent.kind : ev_name, ev_workers, {},
                         ev_record.empty() ? nullptr : &logs);
            for (const auto& log : logs) {
                write_episode_log(fs::path(ev_record) / (log.id + ".jsonl"), log);
            }
            const std::string text = render_report(report, report_format_from_string(ev_format));
            if (ev_out.empty()) {
                out << text;
            } else {
                write_text_file(ev_out, text);
                out << fmt::format("wrote {} report for {} episodes to {}\n", ev_format, report.episode_count,
                                   ev_out);
            }
            return kOk;
        }

        if (sub == serve) {
            ServiceConfig cfg;
            cfg.idle_timeout_s = idle_timeout;
            cfg.record_dir = record_dir;
            const sigset_t signals = block_shutdown_signals();
            SessionService service(cfg);
            const int port = service.bind(serve_host, serve_port);
            service.start();
            out << fmt::format("orbitpe: session service listening on http://{}:{}\n", serve_host, port)
                << std::flush;
            const int sig = wait_for_shutdown(signals);
            service.stop();
            out << fmt::format("orbitpe: {} received, sessions flushed, shut down\n",
                               sig == SIGINT ? "SIGINT" : "SIGTERM")
                << std::flush;
            return kOk;
        }

        if (sub == mock) {
            Policy policy = mock_policy == "navball" ? Policy([](const Observation& o) { return navball_decide(o); })
                                                     : Policy([](const Observation&) { return VerbalAction::coast; });
            const sigset_t signals = block_shutdown_signals();
            ScriptedBackend backend(std::move(policy), mock_cfg);
            ScriptedServer server(backend);
            const int port = server.start(mock_host, mock_port);
            out << fmt::format("orbitpe: scripted chat model listening on http://{}:{}\n", mock_host, port)
                << std::flush;
            wait_for_shutdown(signals);
            server.stop();
            return kOk;
        }
    } catch (const GenerationFailure& e) {
        return fail(fmt::format("generation failed: {}", e.what()), kGenerationFailure);
    } catch (const EvaluationError& e) {
        return fail(fmt::format("evaluation failed: {}", e.what()), kEvaluationFailure);
    } catch (const IoError& e) {
        return fail(e.what(), kIoFailure);
    } catch (const FormatError& e) {
        return fail(e.what(), kIoFailure);
    } catch (const DomainError& e) {
        return fail(e.what(), kUsage);
    } catch (const std::exception& e) {
        return fail(e.what(), kInternal);
    }
    return kUsage;
}

}  // namespace orbitpe::cli
