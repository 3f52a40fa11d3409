#pragma once

#include "orbitpe/episode_log.hpp"
#include "orbitpe/environment.hpp"
#include "orbitpe/scenario.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace orbitpe {

struct ServiceConfig {
    double idle_timeout_s = 600.0;
    double reap_interval_s = 1.0;
    std::filesystem::path record_dir;  ///< empty disables recording
    EnvironmentConfig environment;
    ScenarioConstraints default_constraints;
    int worker_threads = 32;
};

/// Log entry for an action submitted by an external client.
AgentRecord external_agent_record(const ThrottleVector& throttle);

/// HTTP front end for environments:
///   POST   /sessions                {"seed": n} | {"scenario": {...}}
///   POST   /sessions/{id}/step      {"direction": word} | {"throttle": {"r","s","w"}}
///   GET    /sessions/{id}/log       JSON lines
///   GET    /sessions/{id}/telemetry server-sent events
///   DELETE /sessions/{id}
///   GET    /health
/// Steps on one session are serialized; a concurrent step gets 409.
class SessionService {
public:
    explicit SessionService(ServiceConfig config = {});
    ~SessionService();
    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    /// Binds without serving yet. Port 0 picks a free port. Throws Error
    /// when the address is unavailable.
    int bind(const std::string& host, int port);
    /// Serves on a background thread (bind() first).
    void start();
    /// Serves on the calling thread until stop().
    void run();
    /// Stops serving, ends telemetry streams and flushes recorded logs.
    void stop();

    int port() const { return port_; }
    std::size_t session_count() const;
    /// Removes sessions idle for longer than the timeout; returns how many.
    std::size_t reap_idle();

private:
    struct Session;

    void install_routes();
    std::shared_ptr<Session> find(const std::string& id) const;
    std::string new_session_id();
    void flush(Session& session);
    void reaper_loop();

    ServiceConfig config_;
    std::unique_ptr<httplib::Server> server_;
    std::thread serve_thread_;
    std::thread reaper_thread_;
    int port_ = 0;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;

    std::mutex reaper_mutex_;
    std::condition_variable reaper_cv_;
    std::atomic<bool> stopping_{false};
    bool stopped_ = false;
};

}  // namespace orbitpe
