#include "orbitpe/scripted_backend.hpp"

#include "orbitpe/prompt.hpp"
#include "orbitpe/rng.hpp"

#include "http_socket.hpp"

#include <httplib.h>
#include <fmt/format.h>

#include <chrono>

namespace orbitpe {

namespace {

double unit_from(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

ScriptedBackend::ScriptedBackend(Policy policy, ScriptedBackendConfig config)
    : policy_(std::move(policy)), config_(std::move(config)) {
    if (!(config_.failure_rate >= 0.0 && config_.failure_rate <= 1.0)) {
        throw DomainError(fmt::format("failure rate {} outside [0, 1]", config_.failure_rate));
    }
}

ChatMessage ScriptedBackend::respond(const ChatRequest& request, double* synthetic_delay_ms) const {
    ChatMessage reply;
    reply.role = "assistant";

    const json& ctx = request.context;
    const std::uint64_t episode = ctx.is_object() ? ctx.value("episode", std::uint64_t{0}) : 0;
    const std::uint64_t turn = ctx.is_object() ? ctx.value("turn", std::uint64_t{0}) : 0;
    const std::uint64_t key = mix64(config_.seed ^ mix64(episode ^ mix64(turn)));

    if (synthetic_delay_ms != nullptr) {
        *synthetic_delay_ms = config_.latency.base_ms + config_.latency.jitter_ms * unit_from(mix64(key + 1));
    }

    if (!ctx.is_object() || !ctx.contains("observation")) {
        reply.content = "No telemetry context was attached to this request.";
        return reply;
    }
    if (config_.failure_rate > 0.0 && unit_from(key) < config_.failure_rate) {
        reply.content = "I am not certain which maneuver is appropriate right now.";
        return reply;
    }

    const Observation obs = ctx.at("observation").get<Observation>();
    const VerbalAction action = policy_(obs);
    return render_action(action, action_rationale(obs, action), ArgumentForm::verbal,
                         fmt::format("call_{}_{}", episode, turn));
}

ChatResult ScriptedBackend::complete(const ChatRequest& request) {
    const auto start = std::chrono::steady_clock::now();
    double delay = 0.0;
    ChatResult result;
    result.message = respond(request, &delay);
    result.http_status = 200;
    result.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() + delay;
    return result;
}

ScriptedServer::ScriptedServer(const ScriptedBackend& backend)
    : backend_(backend), server_(std::make_unique<httplib::Server>()) {
    detail::use_exclusive_bind(*server_);
    server_->Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
        ChatRequest request;
        try {
            request = request_from_wire(json::parse(req.body));
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", {{"message", e.what()}, {"type", "invalid_request_error"}}}}.dump(),
                            "application/json");
            return;
        }
        double delay = 0.0;
        const ChatMessage reply = backend_.respond(request, &delay);
        if (delay > 0.0) {
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
        }
        res.set_content(response_to_wire(reply, backend_.config().model).dump(), "application/json");
    });
    server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"status\":\"ok\"}", "application/json");
    });
}

ScriptedServer::~ScriptedServer() { stop(); }

int ScriptedServer::start(const std::string& host, int port) {
    host_ = host;
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) {
        throw Error(fmt::format("cannot bind scripted backend to {}:{}", host, port));
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void ScriptedServer::stop() {
    if (thread_.joinable()) {
        server_->stop();
        thread_.join();
    }
}

std::string ScriptedServer::base_url() const { return fmt::format("http://{}:{}", host_, port_); }

}  // namespace orbitpe
