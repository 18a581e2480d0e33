#pragma once

// Chat-completions adapter: a Policy backed by a live model that calls the
// benchmark tools through function calling.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pagebound/agents.hpp"

namespace pagebound {

/// Network, auth or HTTP failure. Trials ending this way carry no accuracy.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The model kept answering with something that is not a usable turn.
class ProtocolFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HttpReply {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body to the chat-completions endpoint.
using ChatTransport = std::function<HttpReply(const std::string& body)>;

using RequestLimiter = std::counting_semaphore<1024>;

struct RemoteConfig {
  std::string base_url;  // e.g. https://openrouter.ai/api/v1
  std::string model;
  std::string api_key;
  int max_retries = 2;
  int timeout_seconds = 120;
  double temperature = 0.0;
  /// Receives request and response bodies verbatim when set.
  std::function<void(const std::string&)> wire_log;
  /// Caps concurrent requests across trials when set.
  std::shared_ptr<RequestLimiter> limiter;

  /// Reads REPRO_LLM_BASE_URL, REPRO_LLM_MODEL and REPRO_LLM_API_KEY.
  /// Nullopt unless base URL and model are both set.
  static std::optional<RemoteConfig> from_env();
};

/// Transport over cpp-httplib; https needs OpenSSL support compiled in.
ChatTransport make_http_transport(const RemoteConfig& config);

/// Tool declarations for the tools a condition allows.
nlohmann::json tool_schema(Condition condition);

class RemoteModelPolicy final : public Policy {
 public:
  RemoteModelPolicy(RemoteConfig config, ChatTransport transport);
  explicit RemoteModelPolicy(RemoteConfig config);

  /// Throws InfrastructureError or ProtocolFailure.
  ToolCall step(const Observation& obs) override;
  std::string name() const override { return "remote"; }

  const nlohmann::json& messages() const { return messages_; }

 private:
  nlohmann::json request_body(const Observation& obs) const;
  std::optional<std::pair<ToolCall, nlohmann::json>> parse_reply(const std::string& body) const;

  RemoteConfig config_;
  ChatTransport transport_;
  nlohmann::json messages_ = nlohmann::json::array();
  std::string pending_tool_call_id_;
  bool started_ = false;
};

}  // namespace pagebound
