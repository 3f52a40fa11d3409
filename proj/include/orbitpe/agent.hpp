#pragma once

#include "orbitpe/chat.hpp"
#include "orbitpe/episode_log.hpp"
#include "orbitpe/navball_agent.hpp"
#include "orbitpe/prompt.hpp"
#include "orbitpe/scripted_backend.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace orbitpe {

struct AgentDecision {
    VerbalAction action = VerbalAction::coast;
    AgentRecord record;
};

/// One decision per environment step. An instance serves a single episode.
class Agent {
public:
    virtual ~Agent() = default;
    virtual AgentDecision act(const Observation& observation) = 0;
};

/// Builds a fresh agent for each episode.
using AgentFactory = std::function<std::unique_ptr<Agent>(const Scenario&)>;

/// Calls a policy directly; never fails, zero latency.
class PolicyAgent : public Agent {
public:
    explicit PolicyAgent(Policy policy) : policy_(std::move(policy)) {}
    AgentDecision act(const Observation& observation) override;

private:
    Policy policy_;
};

struct LlmAgentConfig {
    std::string model = "orbitpe-pilot";
    std::size_t window_capacity = 0;
    PromptProfile profile = PromptProfile::agnostic;
    /// Attach the structured observation for scripted backends.
    bool attach_context = true;
    bool record_transcripts = false;
};

/// Prompt -> chat backend -> parse -> verbal action. Failed turns (transport
/// or parse) coast. The backend must outlive the agent.
class LlmAgent : public Agent {
public:
    LlmAgent(ChatBackend& backend, LlmAgentConfig config, std::uint64_t episode_id = 0);
    AgentDecision act(const Observation& observation) override;

    const ContextWindow& window() const { return window_; }
    /// Request for the next turn, without sending it.
    ChatRequest build_request(const Observation& observation) const;

private:
    ChatBackend& backend_;
    LlmAgentConfig config_;
    std::uint64_t episode_id_;
    std::uint64_t turn_ = 0;
    ContextWindow window_;
};

AgentFactory navball_agent_factory(PursuitGains gains = {});
AgentFactory coast_agent_factory();
/// Each episode gets its own LlmAgent keyed by the scenario seed.
AgentFactory llm_agent_factory(ChatBackend& backend, LlmAgentConfig config);

}  // namespace orbitpe
