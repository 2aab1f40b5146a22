#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>

namespace racefix {

class DeadlineExceeded : public std::runtime_error {
 public:
  DeadlineExceeded() : std::runtime_error("deadline exceeded") {}
};

/// Optional wall-clock limit shared by the repair loop, the solvers and the
/// verifier. A default-constructed deadline never expires.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(Clock::time_point at) : at_(at) {}

  static Deadline after(Clock::duration d) { return Deadline(Clock::now() + d); }

  bool expired() const { return at_ && Clock::now() >= *at_; }
  void check() const {
    if (expired()) throw DeadlineExceeded();
  }

 private:
  std::optional<Clock::time_point> at_;
};

}  // namespace racefix
