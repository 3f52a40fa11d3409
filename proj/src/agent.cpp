#include "orbitpe/agent.hpp"

namespace orbitpe {

AgentDecision PolicyAgent::act(const Observation& observation) {
    AgentDecision d;
    d.action = policy_(observation);
    d.record.verbal = std::string(to_string(d.action));
    d.record.rationale = action_rationale(observation, d.action);
    return d;
}

LlmAgent::LlmAgent(ChatBackend& backend, LlmAgentConfig config, std::uint64_t episode_id)
    : backend_(backend), config_(std::move(config)), episode_id_(episode_id), window_(config_.window_capacity) {}

ChatRequest LlmAgent::build_request(const Observation& observation) const {
    ChatRequest req;
    req.model = config_.model;
    req.messages.push_back({"system", system_prompt(config_.profile), {}});
    req.messages.push_back({"user", serialize_prompt(observation, window_, config_.profile), {}});
    req.tools = json::array({perform_action_tool()});
    req.tool_choice = perform_action_choice();
    if (config_.attach_context) {
        req.context = json{{"observation", observation}, {"episode", episode_id_}, {"turn", turn_}};
    }
    return req;
}

AgentDecision LlmAgent::act(const Observation& observation) {
    const ChatRequest req = build_request(observation);
    const ChatResult result = backend_.complete(req);
    ++turn_;

    AgentDecision d;
    d.record.latency_ms = result.latency_ms;
    if (config_.record_transcripts) {
        d.record.prompt = req.messages.back().content;
    }

    if (!result.ok()) {
        d.record.failed = true;
        d.record.failure = "transport:" + std::string(to_string(*result.failure));
        d.record.rationale = result.detail;
    } else {
        const ParsedAction parsed = parse_response(*result.message);
        d.record.rationale = parsed.rationale;
        if (config_.record_transcripts) {
            d.record.response = json(*result.message).dump();
        }
        if (parsed.ok()) {
            d.action = *parsed.action;
        } else {
            d.record.failed = true;
            d.record.failure = "parse:" + std::string(to_string(*parsed.failure));
        }
    }
    d.record.verbal = std::string(to_string(d.action));
    window_.push({observation.mission_time, observation.range, d.action});
    return d;
}

AgentFactory navball_agent_factory(PursuitGains gains) {
    return [gains = std::move(gains)](const Scenario&) {
        return std::make_unique<PolicyAgent>([gains](const Observation& o) { return navball_decide(o, gains); });
    };
}

AgentFactory coast_agent_factory() {
    return [](const Scenario&) {
        return std::make_unique<PolicyAgent>([](const Observation&) { return VerbalAction::coast; });
    };
}

AgentFactory llm_agent_factory(ChatBackend& backend, LlmAgentConfig config) {
    return [&backend, config = std::move(config)](const Scenario& scenario) {
        return std::make_unique<LlmAgent>(backend, config, scenario.seed);
    };
}

}  // namespace orbitpe
