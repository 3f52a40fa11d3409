#pragma once

#include "orbitpe/actions.hpp"
#include "orbitpe/json_io.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orbitpe {

inline constexpr std::string_view kActionToolName = "perform_action";

struct ToolCall {
    std::string id;
    std::string name;
    std::string arguments;  ///< JSON-encoded object, per the chat-completions convention

    bool operator==(const ToolCall&) const = default;
};

struct ChatMessage {
    std::string role;
    std::string content;
    std::vector<ToolCall> tool_calls;

    bool operator==(const ChatMessage&) const = default;
};

void to_json(json& j, const ChatMessage& m);
void from_json(const json& j, ChatMessage& m);

/// Where and how to reach an OpenAI-compatible server.
struct EndpointConfig {
    std::string base_url = "http://127.0.0.1:8000";
    std::string model = "orbitpe-pilot";
    std::string api_key;
    double timeout_s = 30.0;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    json tools = json::array();
    json tool_choice = "auto";
    /// Optional structured side channel (`x_orbitpe` on the wire). Scripted
    /// backends read the observation from here instead of parsing prose.
    json context;
};

/// The single tool offered to the model.
json perform_action_tool();
/// tool_choice forcing perform_action.
json perform_action_choice();

json request_to_wire(const ChatRequest& request);
/// FormatError on anything that is not a chat-completions request.
ChatRequest request_from_wire(const json& wire);
json response_to_wire(const ChatMessage& message, const std::string& model);
/// choices[0].message of a chat-completions response; FormatError otherwise.
ChatMessage message_from_response(const json& response);

enum class TransportFailure { timeout, connect, http_status, malformed };
std::string_view to_string(TransportFailure failure);

struct ChatResult {
    std::optional<ChatMessage> message;
    std::optional<TransportFailure> failure;
    std::string detail;
    double latency_ms = 0.0;
    int http_status = 0;

    bool ok() const { return message.has_value(); }
};

/// Anything that can answer a chat-completions request. Implementations must
/// tolerate concurrent calls from independent episodes.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResult complete(const ChatRequest& request) = 0;
};

/// Client for POST {base_url}/v1/chat/completions. One retry on transport
/// failure; latency covers every attempt.
class HttpChatClient : public ChatBackend {
public:
    explicit HttpChatClient(EndpointConfig config);
    ChatResult complete(const ChatRequest& request) override;
    const EndpointConfig& config() const { return config_; }

private:
    ChatResult attempt(const std::string& body);

    EndpointConfig config_;
    std::string origin_;
    std::string path_;
};

enum class ParseFailure { no_call, bad_name, bad_args, bad_value };
std::string_view to_string(ParseFailure failure);

struct ParsedAction {
    std::optional<VerbalAction> action;
    std::optional<ParseFailure> failure;
    std::string rationale;

    bool ok() const { return action.has_value(); }
};

/// Accepts perform_action with {"direction": word} or with the throttle
/// triplet {"ft", "rt", "dt"} (forward, right, down; each -1, 0 or 1, at most
/// one nonzero). The rationale is the message text. Never throws.
ParsedAction parse_response(const ChatMessage& message);

enum class ArgumentForm { verbal, triplet };

/// Assistant message calling perform_action for `action`.
ChatMessage render_action(VerbalAction action, const std::string& rationale, ArgumentForm form = ArgumentForm::verbal,
                          const std::string& call_id = "call_0");

}  // namespace orbitpe
