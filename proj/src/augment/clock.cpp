#include <thread>

#include "la3/provider.hpp"

namespace la3::augment {

TimePoint SystemClock::now() {
  return std::chrono::time_point_cast<Duration>(std::chrono::steady_clock::now());
}

void SystemClock::sleep_until(TimePoint t) { std::this_thread::sleep_until(t); }

Clock::Frozen SystemClock::freeze() { return {now(), nullptr}; }

TimePoint SimulatedClock::now() {
  std::lock_guard lock(mutex_);
  return now_;
}

void SimulatedClock::sleep_until(TimePoint t) {
  std::unique_lock lock(mutex_);
  released_.wait(lock, [this] { return holders_ == 0; });
  if (t > now_) now_ = t;
}

void SimulatedClock::advance(Duration d) {
  std::unique_lock lock(mutex_);
  released_.wait(lock, [this] { return holders_ == 0; });
  now_ += d;
}

Clock::Frozen SimulatedClock::freeze() {
  std::lock_guard lock(mutex_);
  ++holders_;
  return {now_, [this] {
            std::lock_guard inner(mutex_);
            if (--holders_ == 0) released_.notify_all();
          }};
}

Clock::Frozen RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  constexpr Duration kWindow{60000};
  for (;;) {
    auto frozen = clock_.freeze();
    if (per_minute_ <= 0) return frozen;
    while (!granted_.empty() && granted_.front() <= frozen.at() - kWindow) granted_.pop_front();
    if (granted_.size() < static_cast<std::size_t>(per_minute_)) {
      granted_.push_back(frozen.at());
      return frozen;
    }
    const TimePoint wake = granted_.front() + kWindow;
    frozen.reset();
    clock_.sleep_until(wake);
  }
}

}  // namespace la3::augment
