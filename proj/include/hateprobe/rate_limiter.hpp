#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <vector>

namespace hateprobe {

using Seconds = std::chrono::duration<double>;

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  virtual void sleep_for(Seconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() const override { return std::chrono::steady_clock::now(); }
  void sleep_for(Seconds d) override;
};

// Test clock: sleeping advances time instantly and is recorded.
class ManualClock final : public Clock {
 public:
  time_point now() const override;
  void sleep_for(Seconds d) override;
  void advance(Seconds d);
  std::vector<double> sleeps() const;

 private:
  mutable std::mutex mutex_;
  time_point now_{};
  std::vector<double> sleeps_;
};

std::shared_ptr<Clock> system_clock();

// Spaces acquisitions at least 60/requests_per_minute seconds apart. Slots are
// handed out under a lock so concurrent callers queue in arrival order.
class RateLimiter {
 public:
  RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock);

  void acquire();
  // Pushes the next free slot back, e.g. after a Retry-After from the server.
  void defer(Seconds d);

 private:
  Seconds interval_;
  std::shared_ptr<Clock> clock_;
  std::mutex mutex_;
  Clock::time_point next_slot_{};
  bool started_ = false;
};

}  // namespace hateprobe
