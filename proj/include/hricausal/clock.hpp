#pragma once

#include <condition_variable>
#include <mutex>
#include <stop_token>

namespace hricausal {

/// Monotonic simulated clock shared by the pipeline stages.
///
/// Only the owner (the scenario runner) advances it. Other execution contexts
/// read it or block until it reaches a given time.
class SimClock {
 public:
  explicit SimClock(double start = 0.0) : now_(start) {}

  SimClock(const SimClock&) = delete;
  SimClock& operator=(const SimClock&) = delete;

  double now() const {
    std::lock_guard lock(mutex_);
    return now_;
  }

  /// Moves time forward. Requests to move backwards are ignored.
  void advance_to(double t) {
    {
      std::lock_guard lock(mutex_);
      if (t <= now_) return;
      now_ = t;
    }
    cv_.notify_all();
  }

  void advance_by(double dt) {
    {
      std::lock_guard lock(mutex_);
      if (dt <= 0.0) return;
      now_ += dt;
    }
    cv_.notify_all();
  }

  /// Blocks until now() >= t or a stop is requested. Returns false on stop.
  bool wait_until(double t, std::stop_token stop) {
    std::unique_lock lock(mutex_);
    return cv_.wait(lock, stop, [&] { return now_ >= t; });
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable_any cv_;
  double now_;
};

}  // namespace hricausal
