#pragma once

#include <atomic>
#include <cstddef>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "hateprobe/backends.hpp"
#include "hateprobe/cache.hpp"
#include "hateprobe/prompt.hpp"
#include "hateprobe/rate_limiter.hpp"

namespace hateprobe {

struct GatewayStats {
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::size_t rate_limit_waits = 0;
};

inline constexpr int kMaxRateLimitWaits = 32;

// Cache-first delivery of prompts to registered backends. Safe for
// concurrent callers: identical in-flight prompts share one backend call, and
// each model has its own rate limiter.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<CompletionCache> cache, std::shared_ptr<Clock> clock = system_clock());

  // Backends are keyed by model_id.
  void register_backend(const BackendConfig& config, std::shared_ptr<CompletionBackend> backend);

  // Throws BackendError once the retry budget is spent or on a fatal reply.
  std::string complete(const RenderedPrompt& prompt, const BackendConfig& config);
  std::string complete(std::string_view prompt_text, const BackendConfig& config);

  GatewayStats stats() const;

 private:
  struct Route {
    std::shared_ptr<CompletionBackend> backend;
    std::unique_ptr<RateLimiter> limiter;
  };

  std::string call_with_retries(const std::string& prompt, const BackendConfig& config, Route& route);

  std::shared_ptr<CompletionCache> cache_;
  std::shared_ptr<Clock> clock_;
  std::mutex routes_mutex_;
  std::map<std::string, Route> routes_;
  std::mutex inflight_mutex_;
  std::unordered_map<std::string, std::shared_future<std::string>> inflight_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> rate_limit_waits_{0};
};

}  // namespace hateprobe
