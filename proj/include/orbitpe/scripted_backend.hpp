#pragma once

#include "orbitpe/chat.hpp"
#include "orbitpe/environment.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace orbitpe {

using Policy = std::function<VerbalAction(const Observation&)>;

/// Synthetic response latency: base + uniform jitter in [0, jitter_ms).
struct LatencyModel {
    double base_ms = 0.0;
    double jitter_ms = 0.0;
};

struct ScriptedBackendConfig {
    /// Probability that a turn answers with plain text and no tool call.
    double failure_rate = 0.0;
    std::uint64_t seed = 0;
    LatencyModel latency;
    std::string model = "scripted";
};

/// Test double for a chat model. Reads the observation from the request's
/// side channel ({"observation", "episode", "turn"}), asks `policy`, and
/// answers with a perform_action call. Whether a turn fails is a pure
/// function of (seed, episode, turn), so results do not depend on thread
/// scheduling.
class ScriptedBackend : public ChatBackend {
public:
    ScriptedBackend(Policy policy, ScriptedBackendConfig config = {});

    /// In-process call; the synthetic latency is added to the measured
    /// wall-clock time, not slept.
    ChatResult complete(const ChatRequest& request) override;

    /// The reply and its synthetic delay, used by both transports.
    ChatMessage respond(const ChatRequest& request, double* synthetic_delay_ms = nullptr) const;

    const ScriptedBackendConfig& config() const { return config_; }

private:
    Policy policy_;
    ScriptedBackendConfig config_;
};

/// Serves a ScriptedBackend as POST /v1/chat/completions on loopback.
/// The synthetic delay is slept before answering.
class ScriptedServer {
public:
    explicit ScriptedServer(const ScriptedBackend& backend);
    ~ScriptedServer();
    ScriptedServer(const ScriptedServer&) = delete;
    ScriptedServer& operator=(const ScriptedServer&) = delete;

    /// Binds (port 0 = any free port) and starts serving; returns the port.
    /// Throws Error if the port cannot be bound.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();
    std::string base_url() const;

private:
    const ScriptedBackend& backend_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::string host_;
    int port_ = 0;
};

}  // namespace orbitpe
