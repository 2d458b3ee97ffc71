#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hateprobe {

enum class BackendKind { kChat, kCompletion, kLocal, kMock };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::string model_id;
  double temperature = 0.0;
  int max_output_tokens = 256;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int requests_per_minute = 60;
  double backoff_initial_seconds = 1.0;
  std::string base_url;                        // chat/completion/local
  std::string api_key_env = "OPENAI_API_KEY";  // chat/completion
  // Mock only: ordered {"contains"|"regex": ..., "response": ...} rules.
  nlohmann::json mock_rules = nlohmann::json::array();
  std::string mock_default = "normal";
};

// Throws DataError on out-of-range fields.
void validate(const BackendConfig& config);

nlohmann::json to_json(const BackendConfig& config);
BackendConfig backend_config_from_json(const nlohmann::json& j);

struct BackendReply {
  enum class Status { kOk, kTransient, kRateLimited, kFatal };
  Status status = Status::kOk;
  std::string text;
  std::string error;
  double retry_after_seconds = 0.0;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Must be safe to call concurrently.
  virtual BackendReply send(const std::string& prompt, const BackendConfig& config) = 0;
};

struct MockRule {
  std::function<bool(std::string_view)> predicate;
  std::string response;
};

MockRule contains_rule(std::string needle, std::string response);
MockRule regex_rule(const std::string& pattern, std::string response);

// First matching rule wins; `fallback` otherwise. Counts invocations.
class MockBackend final : public CompletionBackend {
 public:
  MockBackend(std::vector<MockRule> rules, std::string fallback);
  BackendReply send(const std::string& prompt, const BackendConfig& config) override;
  std::string respond(std::string_view prompt) const;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::vector<MockRule> rules_;
  std::string fallback_;
  std::atomic<std::size_t> calls_{0};
};

std::shared_ptr<MockBackend> mock_backend(std::vector<MockRule> rules, std::string fallback);
std::shared_ptr<MockBackend> mock_backend_from_config(const BackendConfig& config);

// OpenAI-compatible chat (/v1/chat/completions) and completion
// (/v1/completions) endpoints, and text-generation-inference style local
// servers (/generate). The chat wrapper sends one user message, no system
// message.
class HttpBackend final : public CompletionBackend {
 public:
  BackendReply send(const std::string& prompt, const BackendConfig& config) override;

  static nlohmann::json request_body(const std::string& prompt, const BackendConfig& config);
  static std::string request_path(const BackendConfig& config);
  // Throws std::runtime_error when the reply does not carry text.
  static std::string extract_text(const nlohmann::json& reply, const BackendConfig& config);
};

std::shared_ptr<CompletionBackend> make_backend(const BackendConfig& config);

}  // namespace hateprobe
