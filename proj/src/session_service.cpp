#include "orbitpe/session_service.hpp"

#include "orbitpe/actions.hpp"
#include "orbitpe/error.hpp"

#include "http_socket.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <random>
#include <vector>

namespace orbitpe {

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump() + "\n", kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    send_json(res, status, extra);
}

std::string sse_event(const std::string& event, const json& data) {
    return fmt::format("event: {}\ndata: {}\n\n", event, data.dump());
}

}  // namespace

AgentRecord external_agent_record(const ThrottleVector& throttle) {
    AgentRecord record;
    if (const auto action = throttle_to_action(throttle)) {
        record.verbal = std::string(to_string(*action));
    }
    return record;
}

struct SessionService::Session {
    Session(std::string id, EnvironmentConfig config) : id(std::move(id)), env(config) {}

    const std::string id;
    Environment env;

    std::mutex step_mutex;  // held for the duration of a step

    mutable std::mutex state_mutex;  // guards everything below
    std::condition_variable changed;
    EpisodeLog log;
    std::vector<Observation> observations;  // after each step
    Clock::time_point last_activity = Clock::now();
    bool terminated = false;
    TerminationReason reason = TerminationReason::none;
    bool closed = false;  // deleted, reaped, or service stopped
    bool flushed = false;

    void touch() {
        std::lock_guard lock(state_mutex);
        last_activity = Clock::now();
    }
    void close() {
        {
            std::lock_guard lock(state_mutex);
            closed = true;
        }
        changed.notify_all();
    }
};

SessionService::SessionService(ServiceConfig config)
    : config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    config_.environment.validate();
    config_.default_constraints.validate();
    if (!(config_.idle_timeout_s > 0.0)) {
        throw DomainError(fmt::format("idle timeout must be positive, got {}", config_.idle_timeout_s));
    }
    const int threads = std::max(config_.worker_threads, 2);
    detail::use_exclusive_bind(*server_);
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    install_routes();
}

SessionService::~SessionService() {
    try {
        stop();
    } catch (...) {
    }
}

int SessionService::bind(const std::string& host, int port) {
    if (port < 0 || port > 65535) {
        throw DomainError(fmt::format("port must lie in [0, 65535], got {}", port));
    }
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else {
        port_ = server_->bind_to_port(host, port) ? port : -1;
    }
    if (port_ <= 0) {
        throw IoError(fmt::format("cannot listen on {}:{} (address in use or unavailable)", host, port));
    }
    return port_;
}

void SessionService::start() {
    if (port_ <= 0) {
        throw Error("SessionService::start() called before bind()");
    }
    serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
    reaper_thread_ = std::thread([this] { reaper_loop(); });
    server_->wait_until_ready();
}

void SessionService::run() {
    if (port_ <= 0) {
        throw Error("SessionService::run() called before bind()");
    }
    reaper_thread_ = std::thread([this] { reaper_loop(); });
    server_->listen_after_bind();
}

void SessionService::stop() {
    {
        std::lock_guard lock(reaper_mutex_);
        if (stopped_) {
            return;
        }
        stopped_ = true;
        stopping_ = true;
    }
    reaper_cv_.notify_all();

    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(sessions_mutex_);
        for (auto& [id, s] : sessions_) {
            all.push_back(s);
        }
    }
    for (auto& s : all) {
        s->close();  // releases telemetry streams
    }
    server_->stop();
    if (serve_thread_.joinable()) {
        serve_thread_.join();
    }
    if (reaper_thread_.joinable()) {
        reaper_thread_.join();
    }
    for (auto& s : all) {
        std::lock_guard step(s->step_mutex);
        flush(*s);
    }
}

std::size_t SessionService::session_count() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::string SessionService::new_session_id() {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    for (;;) {
        std::uint64_t hi = gen();
        std::uint64_t lo = gen();
        hi = (hi & ~0xF000ULL) | 0x4000ULL;                      // version 4
        lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
        std::string id = fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32, (hi >> 16) & 0xFFFF,
                                     hi & 0xFFFF, lo >> 48, lo & 0xFFFFFFFFFFFFULL);
        std::lock_guard lock(sessions_mutex_);
        if (sessions_.count(id) == 0) {
            return id;
        }
    }
}

void SessionService::flush(Session& session) {
    if (config_.record_dir.empty()) {
        return;
    }
    EpisodeLog log;
    {
        std::lock_guard lock(session.state_mutex);
        if (session.flushed || session.log.steps.empty()) {
            return;
        }
        session.flushed = session.terminated;  // a live session is rewritten on its next flush
        log = session.log;
    }
    try {
        write_episode_log(config_.record_dir / (session.id + ".jsonl"), log);
    } catch (const std::exception& e) {
        fmt::print(stderr, "orbitpe: failed to record session {}: {}\n", session.id, e.what());
    }
}

std::size_t SessionService::reap_idle() {
    const auto cutoff = Clock::now() - std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(config_.idle_timeout_s));
    std::vector<std::shared_ptr<Session>> reaped;
    {
        std::lock_guard lock(sessions_mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            bool idle = false;
            {
                std::lock_guard state(it->second->state_mutex);
                idle = it->second->last_activity < cutoff;
            }
            if (idle) {
                reaped.push_back(it->second);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& s : reaped) {
        s->close();
        std::lock_guard step(s->step_mutex);
        flush(*s);
    }
    return reaped.size();
}

void SessionService::reaper_loop() {
    const auto interval = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(std::max(config_.reap_interval_s, 0.01)));
    std::unique_lock lock(reaper_mutex_);
    while (!stopping_) {
        reaper_cv_.wait_for(lock, interval, [this] { return stopping_.load(); });
        if (stopping_) {
            break;
        }
        lock.unlock();
        reap_idle();
        lock.lock();
    }
}

void SessionService::install_routes() {
    auto& srv = *server_;

    srv.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}, {"sessions", session_count()}});
    });

    srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = req.body.empty() ? json::object() : json::parse(req.body);
        } catch (const json::parse_error& e) {
            return send_error(res, 400, fmt::format("malformed JSON: {}", e.what()));
        }
        if (!body.is_object()) {
            return send_error(res, 400, "request body must be a JSON object");
        }

        Scenario scenario;
        try {
            if (body.contains("scenario")) {
                scenario = body.at("scenario").get<Scenario>();
            } else if (body.contains("pursuer")) {
                scenario = body.get<Scenario>();
            } else {
                ScenarioConstraints constraints = config_.default_constraints;
                if (body.contains("constraints")) {
                    constraints = body.at("constraints").get<ScenarioConstraints>();
                }
                const auto seed = body.value("seed", std::uint64_t{0});
                scenario = sample_scenario(default_evader_elements(), constraints, seed);
            }
        } catch (const json::exception& e) {
            return send_error(res, 400, fmt::format("invalid scenario: {}", e.what()));
        } catch (const GenerationFailure& e) {
            return send_error(res, 422, e.what());
        } catch (const DomainError& e) {
            return send_error(res, 400, e.what());
        }

        const ConstraintReport report = verify_constraints(scenario);
        if (!report.all_passed()) {
            return send_error(res, 422, fmt::format("scenario violates constraints: {}", report.failure_summary()),
                              {{"constraint_report", report}});
        }

        auto session = std::make_shared<Session>(new_session_id(), config_.environment);
        Observation first;
        try {
            first = session->env.reset(scenario);
        } catch (const Error& e) {
            return send_error(res, 422, e.what());
        }
        session->log.id = session->id;
        session->log.seed = scenario.seed;
        {
            std::lock_guard lock(sessions_mutex_);
            sessions_.emplace(session->id, session);
        }
        send_json(res, 201,
                  {{"session_id", session->id},
                   {"observation", first},
                   {"max_steps", session->env.max_steps()},
                   {"scenario", scenario}});
    });

    srv.Post(R"(/sessions/([^/]+)/step)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto session = find(req.matches[1]);
        if (!session) {
            return send_error(res, 404, fmt::format("no session '{}'", req.matches[1].str()));
        }
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            return send_error(res, 400, fmt::format("malformed JSON: {}", e.what()));
        }

        ThrottleVector throttle;
        try {
            if (body.contains("direction")) {
                const auto word = body.at("direction").get<std::string>();
                const auto action = verbal_action_from_string(word);
                if (!action) {
                    return send_error(res, 400, fmt::format("unknown direction '{}'", word));
                }
                throttle = action_to_throttle(*action);
            } else if (body.contains("throttle")) {
                throttle = body.at("throttle").get<ThrottleVector>();
                throttle.validate();
            } else {
                return send_error(res, 400, "step body needs \"direction\" or \"throttle\"");
            }
        } catch (const json::exception& e) {
            return send_error(res, 400, fmt::format("invalid action: {}", e.what()));
        } catch (const DomainError& e) {
            return send_error(res, 400, e.what());
        }

        AgentRecord record = external_agent_record(throttle);
        record.rationale = body.value("rationale", std::string{});
        record.latency_ms = body.value("latency_ms", 0.0);

        std::unique_lock step_lock(session->step_mutex, std::try_to_lock);
        if (!step_lock.owns_lock()) {
            return send_error(res, 409, "another step is in progress on this session");
        }
        if (session->env.terminated()) {
            return send_error(res, 409, "episode has terminated",
                              {{"termination_reason", to_string(session->reason)}});
        }

        const Observation before = session->env.observation();
        StepResult result;
        try {
            result = session->env.step(throttle);
        } catch (const Error& e) {
            return send_error(res, 409, e.what());
        }
        {
            std::lock_guard lock(session->state_mutex);
            session->log.steps.push_back(make_step_record(before, result, throttle, std::move(record)));
            session->observations.push_back(result.observation);
            session->terminated = result.terminated;
            session->reason = result.termination_reason;
            session->last_activity = Clock::now();
        }
        session->changed.notify_all();
        if (result.terminated) {
            flush(*session);
        }
        send_json(res, 200, result);
    });

    srv.Get(R"(/sessions/([^/]+)/log)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto session = find(req.matches[1]);
        if (!session) {
            return send_error(res, 404, fmt::format("no session '{}'", req.matches[1].str()));
        }
        session->touch();
        std::string text;
        {
            std::lock_guard lock(session->state_mutex);
            text = to_jsonl(session->log);
        }
        res.status = 200;
        res.set_content(text, "application/x-ndjson");
    });

    srv.Get(R"(/sessions/([^/]+)/telemetry)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto session = find(req.matches[1]);
        if (!session) {
            return send_error(res, 404, fmt::format("no session '{}'", req.matches[1].str()));
        }
        session->touch();
        std::size_t cursor = 0;
        {
            std::lock_guard lock(session->state_mutex);
            cursor = session->observations.size();  // new subscribers start at the current step
        }
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream", [session, cursor](std::size_t, httplib::DataSink& sink) mutable {
                std::vector<std::string> chunks;
                bool finish = false;
                {
                    std::unique_lock lock(session->state_mutex);
                    session->changed.wait_for(lock, std::chrono::milliseconds(500), [&] {
                        return session->observations.size() > cursor || session->terminated || session->closed;
                    });
                    for (; cursor < session->observations.size(); ++cursor) {
                        chunks.push_back(sse_event(
                            "observation", {{"step", cursor + 1}, {"observation", session->observations[cursor]}}));
                    }
                    if (session->terminated) {
                        chunks.push_back(sse_event("termination", {{"reason", to_string(session->reason)},
                                                                   {"steps", session->observations.size()}}));
                        finish = true;
                    } else if (session->closed) {
                        chunks.push_back(sse_event("closed", {{"steps", session->observations.size()}}));
                        finish = true;
                    }
                }
                for (const auto& chunk : chunks) {
                    if (!sink.write(chunk.data(), chunk.size())) {
                        return false;
                    }
                }
                if (finish) {
                    sink.done();
                } else if (chunks.empty() && !sink.is_writable()) {
                    return false;
                }
                return true;
            });
    });

    srv.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        std::shared_ptr<Session> session;
        {
            std::lock_guard lock(sessions_mutex_);
            const auto it = sessions_.find(req.matches[1]);
            if (it != sessions_.end()) {
                session = it->second;
                sessions_.erase(it);
            }
        }
        if (!session) {
            return send_error(res, 404, fmt::format("no session '{}'", req.matches[1].str()));
        }
        session->close();
        {
            std::lock_guard step(session->step_mutex);
            flush(*session);
        }
        res.status = 204;
    });

    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send_error(res, 500, what);
    });
}

}  // namespace orbitpe
