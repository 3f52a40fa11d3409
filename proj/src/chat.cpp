#include "orbitpe/chat.hpp"

#include <httplib.h>
#include <fmt/format.h>

#include <chrono>

namespace orbitpe {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Throttle value in {-1, 0, 1}; integral floats are accepted.
std::optional<int> unit_throttle(const json& v) {
    if (!v.is_number()) {
        return std::nullopt;
    }
    const double d = v.get<double>();
    if (d == -1.0 || d == 0.0 || d == 1.0) {
        return static_cast<int>(d);
    }
    return std::nullopt;
}

}  // namespace

void to_json(json& j, const ChatMessage& m) {
    j = json{{"role", m.role}, {"content", m.content}};
    if (!m.tool_calls.empty()) {
        json calls = json::array();
        for (const auto& c : m.tool_calls) {
            calls.push_back({{"id", c.id},
                             {"type", "function"},
                             {"function", {{"name", c.name}, {"arguments", c.arguments}}}});
        }
        j["tool_calls"] = std::move(calls);
    }
}

void from_json(const json& j, ChatMessage& m) {
    j.at("role").get_to(m.role);
    const auto content = j.find("content");
    m.content = (content != j.end() && content->is_string()) ? content->get<std::string>() : std::string{};
    m.tool_calls.clear();
    const auto calls = j.find("tool_calls");
    if (calls != j.end() && calls->is_array()) {
        for (const auto& c : *calls) {
            ToolCall call;
            call.id = c.value("id", std::string{});
            const auto& fn = c.at("function");
            fn.at("name").get_to(call.name);
            const auto& args = fn.at("arguments");
            // Some servers send the arguments as an object instead of a string.
            call.arguments = args.is_string() ? args.get<std::string>() : args.dump();
            m.tool_calls.push_back(std::move(call));
        }
    }
}

json perform_action_tool() {
    json directions = json::array();
    for (const VerbalAction a : kAllVerbalActions) {
        directions.push_back(std::string(to_string(a)));
    }
    return json{{"type", "function"},
                {"function",
                 {{"name", std::string(kActionToolName)},
                  {"description", "Fire the pursuer's thrusters for one decision interval."},
                  {"parameters",
                   {{"type", "object"},
                    {"properties",
                     {{"direction",
                       {{"type", "string"},
                        {"enum", directions},
                        {"description", "forward/backward: along-track; right/left: radial; up/down: orbit normal"}}}}},
                    {"required", json::array({"direction"})}}}}}};
}

json perform_action_choice() {
    return json{{"type", "function"}, {"function", {{"name", std::string(kActionToolName)}}}};
}

json request_to_wire(const ChatRequest& request) {
    json wire{{"model", request.model}, {"messages", request.messages}};
    if (!request.tools.empty()) {
        wire["tools"] = request.tools;
        wire["tool_choice"] = request.tool_choice;
    }
    if (!request.context.is_null()) {
        wire["x_orbitpe"] = request.context;
    }
    return wire;
}

ChatRequest request_from_wire(const json& wire) {
    try {
        ChatRequest req;
        req.model = wire.value("model", std::string{});
        wire.at("messages").get_to(req.messages);
        req.tools = wire.value("tools", json::array());
        req.tool_choice = wire.value("tool_choice", json("auto"));
        req.context = wire.value("x_orbitpe", json());
        return req;
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("invalid chat-completions request: {}", e.what()));
    }
}

json response_to_wire(const ChatMessage& message, const std::string& model) {
    const bool called = !message.tool_calls.empty();
    return json{{"id", "chatcmpl-orbitpe"},
                {"object", "chat.completion"},
                {"created", 0},
                {"model", model},
                {"choices",
                 json::array({{{"index", 0},
                               {"message", message},
                               {"finish_reason", called ? "tool_calls" : "stop"}}})}};
}

ChatMessage message_from_response(const json& response) {
    try {
        const auto& choices = response.at("choices");
        if (!choices.is_array() || choices.empty()) {
            throw FormatError("response has no choices");
        }
        return choices.at(0).at("message").get<ChatMessage>();
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("invalid chat-completions response: {}", e.what()));
    }
}

std::string_view to_string(TransportFailure failure) {
    switch (failure) {
        case TransportFailure::timeout: return "timeout";
        case TransportFailure::connect: return "connect";
        case TransportFailure::http_status: return "http_status";
        case TransportFailure::malformed: return "malformed";
    }
    return "connect";
}

std::string_view to_string(ParseFailure failure) {
    switch (failure) {
        case ParseFailure::no_call: return "no_call";
        case ParseFailure::bad_name: return "bad_name";
        case ParseFailure::bad_args: return "bad_args";
        case ParseFailure::bad_value: return "bad_value";
    }
    return "no_call";
}

HttpChatClient::HttpChatClient(EndpointConfig config) : config_(std::move(config)) {
    // Split "scheme://host:port/prefix" into origin and path.
    const auto scheme_end = config_.base_url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = config_.base_url.find('/', host_start);
    origin_ = config_.base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? std::string{} : config_.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    const bool has_version = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
    path_ = prefix + (has_version ? "/chat/completions" : "/v1/chat/completions");
}

ChatResult HttpChatClient::attempt(const std::string& body) {
    httplib::Client client(origin_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    ChatResult result;
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
        const auto err = res.error();
        result.failure = (err == httplib::Error::Read || err == httplib::Error::Write ||
                          err == httplib::Error::ConnectionTimeout)
                             ? TransportFailure::timeout
                             : TransportFailure::connect;
        result.detail = httplib::to_string(err);
        return result;
    }
    result.http_status = res->status;
    if (res->status < 200 || res->status >= 300) {
        result.failure = TransportFailure::http_status;
        result.detail = fmt::format("HTTP {}", res->status);
        return result;
    }
    try {
        result.message = message_from_response(json::parse(res->body));
    } catch (const std::exception& e) {
        result.failure = TransportFailure::malformed;
        result.detail = e.what();
    }
    return result;
}

ChatResult HttpChatClient::complete(const ChatRequest& request) {
    const std::string body = request_to_wire(request).dump();
    const auto start = std::chrono::steady_clock::now();
    ChatResult result = attempt(body);
    if (!result.ok()) {
        result = attempt(body);
    }
    result.latency_ms = elapsed_ms(start);
    return result;
}

ParsedAction parse_response(const ChatMessage& message) {
    ParsedAction out;
    out.rationale = message.content;
    if (message.tool_calls.empty()) {
        out.failure = ParseFailure::no_call;
        return out;
    }
    const ToolCall& call = message.tool_calls.front();
    if (call.name != kActionToolName) {
        out.failure = ParseFailure::bad_name;
        return out;
    }
    const json args = json::parse(call.arguments, nullptr, /*allow_exceptions=*/false);
    if (!args.is_object()) {
        out.failure = ParseFailure::bad_args;
        return out;
    }

    if (const auto dir = args.find("direction"); dir != args.end()) {
        if (!dir->is_string()) {
            out.failure = ParseFailure::bad_value;
            return out;
        }
        out.action = verbal_action_from_string(dir->get<std::string>());
        if (!out.action) {
            out.failure = ParseFailure::bad_value;
        }
        return out;
    }

    if (args.contains("ft") && args.contains("rt") && args.contains("dt")) {
        const auto ft = unit_throttle(args["ft"]);
        const auto rt = unit_throttle(args["rt"]);
        const auto dt = unit_throttle(args["dt"]);
        if (!ft || !rt || !dt) {
            out.failure = ParseFailure::bad_value;
            return out;
        }
        // dt is the "down" throttle: +1 pushes toward -W.
        out.action = throttle_to_action(ThrottleVector{*rt, *ft, -*dt});
        if (!out.action) {
            out.failure = ParseFailure::bad_value;
        }
        return out;
    }

    out.failure = ParseFailure::bad_args;
    return out;
}

ChatMessage render_action(VerbalAction action, const std::string& rationale, ArgumentForm form,
                          const std::string& call_id) {
    json args;
    if (form == ArgumentForm::verbal) {
        args = {{"direction", std::string(to_string(action))}};
    } else {
        const ThrottleVector t = action_to_throttle(action);
        args = {{"ft", t.along_track}, {"rt", t.radial}, {"dt", -t.cross_track}};
    }
    ChatMessage msg;
    msg.role = "assistant";
    msg.content = rationale;
    msg.tool_calls.push_back(ToolCall{call_id, std::string(kActionToolName), args.dump()});
    return msg;
}

}  // namespace orbitpe
