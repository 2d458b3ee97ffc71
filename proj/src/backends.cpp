#include "hateprobe/backends.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "hateprobe/error.hpp"

namespace hateprobe {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kChat:
      return "chat";
    case BackendKind::kCompletion:
      return "completion";
    case BackendKind::kLocal:
      return "local";
    case BackendKind::kMock:
      return "mock";
  }
  return "mock";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "chat") return BackendKind::kChat;
  if (name == "completion") return BackendKind::kCompletion;
  if (name == "local") return BackendKind::kLocal;
  if (name == "mock") return BackendKind::kMock;
  throw DataError("unknown backend kind '" + std::string(name) + "'");
}

void validate(const BackendConfig& c) {
  if (c.model_id.empty()) throw DataError("backend model_id must be set");
  if (c.temperature < 0.0) throw DataError("temperature must be >= 0 for " + c.model_id);
  if (c.max_output_tokens <= 0) throw DataError("max_output_tokens must be positive for " + c.model_id);
  if (c.timeout_seconds <= 0.0) throw DataError("timeout must be positive for " + c.model_id);
  if (c.max_retries < 0) throw DataError("max_retries must be >= 0 for " + c.model_id);
  if (c.requests_per_minute <= 0) throw DataError("requests_per_minute must be positive for " + c.model_id);
  if (c.kind != BackendKind::kMock && c.base_url.empty()) throw DataError("base_url required for " + c.model_id);
}

nlohmann::json to_json(const BackendConfig& c) {
  nlohmann::json j = {{"kind", std::string(to_string(c.kind))},
                      {"model_id", c.model_id},
                      {"temperature", c.temperature},
                      {"max_output_tokens", c.max_output_tokens},
                      {"timeout", c.timeout_seconds},
                      {"max_retries", c.max_retries},
                      {"requests_per_minute", c.requests_per_minute},
                      {"backoff_initial", c.backoff_initial_seconds}};
  if (c.kind == BackendKind::kMock) {
    j["rules"] = c.mock_rules;
    j["default"] = c.mock_default;
  } else {
    j["base_url"] = c.base_url;
    j["api_key_env"] = c.api_key_env;
  }
  return j;
}

BackendConfig backend_config_from_json(const nlohmann::json& j) {
  BackendConfig c;
  c.kind = parse_backend_kind(j.value("kind", std::string("mock")));
  c.model_id = j.at("model_id").get<std::string>();
  c.temperature = j.value("temperature", c.temperature);
  c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
  c.timeout_seconds = j.value("timeout", c.timeout_seconds);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.requests_per_minute = j.value("requests_per_minute", c.kind == BackendKind::kMock ? 1000000 : 60);
  c.backoff_initial_seconds = j.value("backoff_initial", c.backoff_initial_seconds);
  c.base_url = j.value("base_url", std::string{});
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  if (j.contains("rules")) c.mock_rules = j.at("rules");
  c.mock_default = j.value("default", c.mock_default);
  validate(c);
  return c;
}

MockRule contains_rule(std::string needle, std::string response) {
  return {[needle = std::move(needle)](std::string_view prompt) { return prompt.find(needle) != std::string_view::npos; },
          std::move(response)};
}

MockRule regex_rule(const std::string& pattern, std::string response) {
  auto re = std::make_shared<const std::regex>(pattern);
  return {[re](std::string_view prompt) { return std::regex_search(prompt.begin(), prompt.end(), *re); },
          std::move(response)};
}

MockBackend::MockBackend(std::vector<MockRule> rules, std::string fallback)
    : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

std::string MockBackend::respond(std::string_view prompt) const {
  for (const auto& rule : rules_) {
    if (rule.predicate(prompt)) return rule.response;
  }
  return fallback_;
}

BackendReply MockBackend::send(const std::string& prompt, const BackendConfig&) {
  ++calls_;
  return {BackendReply::Status::kOk, respond(prompt), {}, 0.0};
}

std::shared_ptr<MockBackend> mock_backend(std::vector<MockRule> rules, std::string fallback) {
  return std::make_shared<MockBackend>(std::move(rules), std::move(fallback));
}

std::shared_ptr<MockBackend> mock_backend_from_config(const BackendConfig& config) {
  std::vector<MockRule> rules;
  for (const auto& r : config.mock_rules) {
    auto response = r.at("response").get<std::string>();
    if (r.contains("contains")) {
      rules.push_back(contains_rule(r.at("contains").get<std::string>(), response));
    } else if (r.contains("regex")) {
      rules.push_back(regex_rule(r.at("regex").get<std::string>(), response));
    } else {
      throw DataError("mock rule needs 'contains' or 'regex'");
    }
  }
  return mock_backend(std::move(rules), config.mock_default);
}

nlohmann::json HttpBackend::request_body(const std::string& prompt, const BackendConfig& c) {
  switch (c.kind) {
    case BackendKind::kChat:
      return {{"model", c.model_id},
              {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
              {"temperature", c.temperature},
              {"max_tokens", c.max_output_tokens}};
    case BackendKind::kCompletion:
      return {{"model", c.model_id},
              {"prompt", prompt},
              {"temperature", c.temperature},
              {"max_tokens", c.max_output_tokens}};
    case BackendKind::kLocal: {
      nlohmann::json params = {{"max_new_tokens", c.max_output_tokens}};
      if (c.temperature > 0.0) {
        params["temperature"] = c.temperature;
        params["do_sample"] = true;
      } else {
        params["do_sample"] = false;
      }
      return {{"inputs", prompt}, {"parameters", params}};
    }
    case BackendKind::kMock:
      break;
  }
  throw std::logic_error("mock backend has no HTTP body");
}

std::string HttpBackend::request_path(const BackendConfig& c) {
  switch (c.kind) {
    case BackendKind::kChat:
      return "/v1/chat/completions";
    case BackendKind::kCompletion:
      return "/v1/completions";
    case BackendKind::kLocal:
      return "/generate";
    case BackendKind::kMock:
      break;
  }
  throw std::logic_error("mock backend has no HTTP path");
}

std::string HttpBackend::extract_text(const nlohmann::json& reply, const BackendConfig& c) {
  switch (c.kind) {
    case BackendKind::kChat:
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    case BackendKind::kCompletion:
      return reply.at("choices").at(0).at("text").get<std::string>();
    case BackendKind::kLocal:
      if (reply.is_array()) return reply.at(0).at("generated_text").get<std::string>();
      return reply.at("generated_text").get<std::string>();
    case BackendKind::kMock:
      break;
  }
  throw std::logic_error("mock backend has no HTTP reply");
}

BackendReply HttpBackend::send(const std::string& prompt, const BackendConfig& c) {
  using Status = BackendReply::Status;
  httplib::Client client(c.base_url);
  auto secs = static_cast<time_t>(c.timeout_seconds);
  auto usecs = static_cast<time_t>((c.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (c.kind != BackendKind::kLocal && !c.api_key_env.empty()) {
    if (const char* key = std::getenv(c.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  auto res = client.Post(request_path(c), headers, request_body(prompt, c).dump(), "application/json");
  if (!res) return {Status::kTransient, {}, "transport: " + httplib::to_string(res.error()), 0.0};
  if (res->status == 429) {
    double wait = 0.0;
    if (res->has_header("Retry-After")) {
      try {
        wait = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
        wait = 0.0;
      }
    }
    return {Status::kRateLimited, {}, "HTTP 429", wait};
  }
  if (res->status >= 500) return {Status::kTransient, {}, "HTTP " + std::to_string(res->status), 0.0};
  if (res->status != 200) {
    return {Status::kFatal, {}, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200), 0.0};
  }
  try {
    return {Status::kOk, extract_text(nlohmann::json::parse(res->body), c), {}, 0.0};
  } catch (const std::exception& e) {
    return {Status::kTransient, {}, std::string("unexpected reply: ") + e.what(), 0.0};
  }
}

std::shared_ptr<CompletionBackend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::kMock) return mock_backend_from_config(config);
  return std::make_shared<HttpBackend>();
}

}  // namespace hateprobe
