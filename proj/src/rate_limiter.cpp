#include "hateprobe/rate_limiter.hpp"

#include <stdexcept>
#include <thread>

namespace hateprobe {

void SystemClock::sleep_for(Seconds d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

Clock::time_point ManualClock::now() const {
  std::lock_guard lock(mutex_);
  return now_;
}

void ManualClock::sleep_for(Seconds d) {
  std::lock_guard lock(mutex_);
  sleeps_.push_back(d.count());
  if (d.count() > 0) now_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(d);
}

void ManualClock::advance(Seconds d) {
  std::lock_guard lock(mutex_);
  now_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(d);
}

std::vector<double> ManualClock::sleeps() const {
  std::lock_guard lock(mutex_);
  return sleeps_;
}

std::shared_ptr<Clock> system_clock() {
  static auto clock = std::make_shared<SystemClock>();
  return clock;
}

RateLimiter::RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock)
    : interval_(60.0 / requests_per_minute), clock_(std::move(clock)) {
  if (requests_per_minute <= 0) throw std::invalid_argument("requests_per_minute must be positive");
}

void RateLimiter::acquire() {
  Clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    auto now = clock_->now();
    if (!started_ || next_slot_ < now) {
      next_slot_ = now;
      started_ = true;
    }
    slot = next_slot_;
    next_slot_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval_);
  }
  auto wait = std::chrono::duration_cast<Seconds>(slot - clock_->now());
  if (wait.count() > 0) clock_->sleep_for(wait);
}

void RateLimiter::defer(Seconds d) {
  std::lock_guard lock(mutex_);
  auto until = clock_->now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(d);
  if (!started_ || next_slot_ < until) {
    next_slot_ = until;
    started_ = true;
  }
}

}  // namespace hateprobe
