#pragma once

#include <stdexcept>
#include <string>

namespace localmq {

// Raised when a caller breaks an operation's precondition (dimension or
// domain mismatch, malformed input, out-of-range parameter).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A membership query that is farther from its anchor than the session's
// locality radius. Carries the offending distance.
class LocalityViolation : public ContractViolation {
 public:
  LocalityViolation(int distance, int radius)
      : ContractViolation("locality violation: query at Hamming distance " +
                          std::to_string(distance) + " exceeds r = " +
                          std::to_string(radius)),
        distance_(distance),
        radius_(radius) {}

  int distance() const noexcept { return distance_; }
  int radius() const noexcept { return radius_; }

 private:
  int distance_;
  int radius_;
};

class DimensionTooLarge : public ContractViolation {
 public:
  DimensionTooLarge(int n, int limit)
      : ContractViolation("dimension " + std::to_string(n) +
                          " exceeds the exact-enumeration limit " +
                          std::to_string(limit)) {}
};

// The grown collection of subsets passed its configured cap.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Randomized procedure gave up (rejection loop, coverage failure). Retrying
// with a fresh seed is expected to succeed.
class RetryableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace localmq
