#include "pagebound/remote.hpp"

#include <cstdlib>

#include <httplib.h>

namespace pagebound {
namespace {

using nlohmann::json;

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("base URL lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out{url.substr(0, path_start), path_start == std::string::npos ? "" : url.substr(path_start)};
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  if (!out.path.ends_with("/chat/completions")) out.path += "/chat/completions";
  return out;
}

json function_tool(const char* name, const char* description, json properties,
                   json required) {
  return {{"type", "function"},
          {"function",
           {{"name", name},
            {"description", description},
            {"parameters",
             {{"type", "object"}, {"properties", std::move(properties)}, {"required", std::move(required)}}}}}};
}

std::string argument_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number()) return value.dump();
  return {};
}

}  // namespace

std::optional<RemoteConfig> RemoteConfig::from_env() {
  RemoteConfig c;
  c.base_url = env_or_empty("REPRO_LLM_BASE_URL");
  c.model = env_or_empty("REPRO_LLM_MODEL");
  c.api_key = env_or_empty("REPRO_LLM_API_KEY");
  if (c.base_url.empty() || c.model.empty()) return std::nullopt;
  return c;
}

ChatTransport make_http_transport(const RemoteConfig& config) {
  auto url = split_url(config.base_url);
  auto client = std::make_shared<httplib::Client>(url.origin);
  client->set_connection_timeout(config.timeout_seconds, 0);
  client->set_read_timeout(config.timeout_seconds, 0);
  client->set_write_timeout(config.timeout_seconds, 0);
  if (!config.api_key.empty()) client->set_bearer_token_auth(config.api_key);
  return [client, path = url.path](const std::string& body) -> HttpReply {
    auto res = client->Post(path, body, "application/json");
    if (!res) {
      throw InfrastructureError("request failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  };
}

json tool_schema(Condition condition) {
  json tools = json::array();
  if (tool_allowed(condition, CallKind::get_index)) {
    tools.push_back(function_tool("get_index",
                                  condition == Condition::deep_indexed
                                      ? "Return the master index: each section's key range."
                                      : "Return the table of contents: each page's key range.",
                                  json::object(), json::array()));
  }
  if (tool_allowed(condition, CallKind::get_section_index)) {
    tools.push_back(function_tool("get_section_index",
                                  "Return the key range of each page in section s.",
                                  {{"s", {{"type", "integer"}}}}, json::array({"s"})));
  }
  tools.push_back(function_tool("read_page", "Return the text of page n.",
                                {{"n", {{"type", "integer"}}}}, json::array({"n"})));
  tools.push_back(function_tool("submit_answer", "Submit the value for the target key.",
                                {{"value", {{"type", "string"}}}}, json::array({"value"})));
  return tools;
}

RemoteModelPolicy::RemoteModelPolicy(RemoteConfig config, ChatTransport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) throw std::invalid_argument("remote policy needs a transport");
}

RemoteModelPolicy::RemoteModelPolicy(RemoteConfig config)
    : RemoteModelPolicy(config, make_http_transport(config)) {}

json RemoteModelPolicy::request_body(const Observation& obs) const {
  return {{"model", config_.model},
          {"messages", messages_},
          {"tools", tool_schema(obs.condition)},
          {"tool_choice", "auto"},
          {"temperature", config_.temperature}};
}

std::optional<std::pair<ToolCall, json>> RemoteModelPolicy::parse_reply(
    const std::string& body) const {
  json reply = json::parse(body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty()) {
    return std::nullopt;
  }
  const json& message = reply["choices"][0].value("message", json::object());
  std::optional<std::int64_t> usage;
  if (reply.contains("usage") && reply["usage"].is_object()) {
    const auto& u = reply["usage"];
    if (u.contains("total_tokens") && u["total_tokens"].is_number_integer()) {
      usage = u["total_tokens"].get<std::int64_t>();
    } else if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number_integer() &&
               u.contains("completion_tokens") && u["completion_tokens"].is_number_integer()) {
      usage = u["prompt_tokens"].get<std::int64_t>() + u["completion_tokens"].get<std::int64_t>();
    }
  }

  if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
      !message["tool_calls"].empty()) {
    const json& tc = message["tool_calls"][0];
    if (!tc.contains("function") || !tc["function"].is_object()) return std::nullopt;
    const json& fn = tc["function"];
    auto kind = parse_tool_name(fn.value("name", ""));
    if (!kind) return std::nullopt;
    json args = json::object();
    if (fn.contains("arguments")) {
      const json& raw = fn["arguments"];
      args = raw.is_string() ? json::parse(raw.get<std::string>().empty() ? "{}" : raw.get<std::string>(),
                                           nullptr, false)
                             : raw;
      if (args.is_discarded() || !args.is_object()) return std::nullopt;
    }
    ToolCall call{*kind, {}, usage};
    const char* field = nullptr;
    switch (*kind) {
      case CallKind::read_page: field = "n"; break;
      case CallKind::get_section_index: field = "s"; break;
      case CallKind::submit_answer: field = "value"; break;
      default: break;
    }
    if (field) {
      if (!args.contains(field)) return std::nullopt;
      call.argument = argument_text(args[field]);
    }
    const std::string id =
        tc.contains("id") && tc["id"].is_string() ? tc["id"].get<std::string>() : "call_0";
    json echoed = {{"role", "assistant"},
                   {"content", nullptr},
                   {"tool_calls", json::array({{{"id", id},
                                                {"type", "function"},
                                                {"function", {{"name", fn["name"]},
                                                              {"arguments", args.dump()}}}}})}};
    return std::make_pair(std::move(call), std::move(echoed));
  }
  if (message.contains("content") && message["content"].is_string()) {
    ToolCall call = ToolCall::free_text(message["content"].get<std::string>());
    call.reported_tokens = usage;
    json echoed = {{"role", "assistant"}, {"content", call.argument}};
    return std::make_pair(std::move(call), std::move(echoed));
  }
  return std::nullopt;
}

ToolCall RemoteModelPolicy::step(const Observation& obs) {
  if (!started_) {
    started_ = true;
    messages_.push_back(
        {{"role", "system"},
         {"content", condition_rules(obs.condition, static_cast<std::size_t>(obs.shape.pages()),
                                     static_cast<std::size_t>(obs.shape.pages_per_section))}});
    messages_.push_back({{"role", "user"}, {"content", obs.preamble}});
  } else if (!pending_tool_call_id_.empty()) {
    messages_.push_back(
        {{"role", "tool"}, {"tool_call_id", pending_tool_call_id_}, {"content", obs.last_result}});
  } else {
    messages_.push_back({{"role", "user"}, {"content", obs.last_result}});
  }

  const std::string body = request_body(obs).dump();
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (config_.wire_log) config_.wire_log("REQUEST " + body);
    HttpReply reply;
    {
      if (config_.limiter) config_.limiter->acquire();
      struct Release {
        RequestLimiter* l;
        ~Release() { if (l) l->release(); }
      } release{config_.limiter.get()};
      reply = transport_(body);
    }
    if (config_.wire_log) config_.wire_log("RESPONSE " + std::to_string(reply.status) + " " + reply.body);
    if (reply.status < 200 || reply.status >= 300) {
      throw InfrastructureError("HTTP " + std::to_string(reply.status) + ": " + reply.body.substr(0, 200));
    }
    if (auto parsed = parse_reply(reply.body)) {
      auto& [call, echoed] = *parsed;
      pending_tool_call_id_ = echoed.contains("tool_calls")
                                  ? echoed["tool_calls"][0]["id"].get<std::string>()
                                  : std::string();
      messages_.push_back(std::move(echoed));
      return call;
    }
  }
  throw ProtocolFailure("no usable reply after " + std::to_string(config_.max_retries + 1) +
                        " attempts");
}

}  // namespace pagebound
