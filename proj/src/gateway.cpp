#include "hateprobe/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hateprobe/digest.hpp"
#include "hateprobe/error.hpp"

namespace hateprobe {

Gateway::Gateway(std::shared_ptr<CompletionCache> cache, std::shared_ptr<Clock> clock)
    : cache_(std::move(cache)), clock_(std::move(clock)) {}

void Gateway::register_backend(const BackendConfig& config, std::shared_ptr<CompletionBackend> backend) {
  validate(config);
  std::lock_guard lock(routes_mutex_);
  routes_[config.model_id] = Route{std::move(backend), std::make_unique<RateLimiter>(config.requests_per_minute, clock_)};
}

std::string Gateway::complete(const RenderedPrompt& prompt, const BackendConfig& config) {
  return complete(std::string_view(prompt.text), config);
}

std::string Gateway::complete(std::string_view prompt_text, const BackendConfig& config) {
  const std::string digest = prompt_digest(prompt_text, config.model_id, config.temperature);
  if (auto hit = cache_->lookup(digest)) {
    ++cache_hits_;
    return *hit;
  }

  std::promise<std::string> promise;
  std::shared_future<std::string> shared;
  bool owner = false;
  {
    std::lock_guard lock(inflight_mutex_);
    auto it = inflight_.find(digest);
    if (it != inflight_.end()) {
      shared = it->second;
    } else {
      // Re-check under the lock: another caller may have finished meanwhile.
      if (auto hit = cache_->lookup(digest)) {
        ++cache_hits_;
        return *hit;
      }
      shared = promise.get_future().share();
      inflight_.emplace(digest, shared);
      owner = true;
    }
  }
  if (!owner) {
    ++cache_hits_;
    return shared.get();
  }

  Route* route = nullptr;
  {
    std::lock_guard lock(routes_mutex_);
    auto it = routes_.find(config.model_id);
    if (it != routes_.end()) route = &it->second;
  }
  try {
    if (!route) throw BackendError("no backend registered for model " + config.model_id, 0);
    std::string text = call_with_retries(std::string(prompt_text), config, *route);
    auto created = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
    cache_->store(CompletionRecord{digest, text, created, config.model_id});
    promise.set_value(text);
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  {
    std::lock_guard lock(inflight_mutex_);
    inflight_.erase(digest);
  }
  return shared.get();
}

std::string Gateway::call_with_retries(const std::string& prompt, const BackendConfig& config, Route& route) {
  using Status = BackendReply::Status;
  const int max_attempts = config.max_retries + 1;
  int attempts = 0;
  int waits = 0;
  std::string last_error;
  while (attempts < max_attempts) {
    route.limiter->acquire();
    ++attempts;
    ++backend_calls_;
    BackendReply reply = route.backend->send(prompt, config);
    switch (reply.status) {
      case Status::kOk:
        return reply.text;
      case Status::kFatal:
        throw BackendError(config.model_id + ": " + reply.error, attempts);
      case Status::kRateLimited: {
        // Honoured by waiting; the attempt is given back.
        if (++waits > kMaxRateLimitWaits) {
          throw BackendError(config.model_id + ": still rate limited after " + std::to_string(waits - 1) + " waits",
                             attempts);
        }
        ++rate_limit_waits_;
        --attempts;
        double wait = reply.retry_after_seconds > 0.0
                          ? reply.retry_after_seconds
                          : std::min(config.timeout_seconds, config.backoff_initial_seconds * std::pow(2.0, waits - 1));
        route.limiter->defer(Seconds(wait));
        continue;
      }
      case Status::kTransient:
        last_error = reply.error;
        if (attempts < max_attempts) {
          ++retries_;
          double backoff = std::min(config.timeout_seconds,
                                    config.backoff_initial_seconds * std::pow(2.0, attempts - 1));
          clock_->sleep_for(Seconds(backoff));
        }
        break;
    }
  }
  throw BackendError(config.model_id + ": failed after " + std::to_string(attempts) + " attempts: " + last_error,
                     attempts);
}

GatewayStats Gateway::stats() const {
  return {backend_calls_.load(), cache_hits_.load(), retries_.load(), rate_limit_waits_.load()};
}

}  // namespace hateprobe
