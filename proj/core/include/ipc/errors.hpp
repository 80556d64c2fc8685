#pragma once

#include <stdexcept>
#include <string>

namespace ipc {

// Configuration or argument violates a documented precondition. The message
// names the violated inequality.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Oracle evaluated outside its domain (e.g. nonpositive denominator of a
// fractional objective).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// alpha_k requested at a point with x == z; the caller's stopping test
// should have fired before this.
class StationaryPointError : public std::runtime_error {
 public:
  explicit StationaryPointError(const std::string& msg) : std::runtime_error(msg) {}
};

// A guarded quotient was reached with a zero denominator, or an internal
// quantity contradicts an established bound. Indicates a bug or a broken
// oracle, not a recoverable condition.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

// Line search exhausted its gradient-evaluation cap. On a Lipschitz oracle
// this cannot happen; it signals a violated smoothness assumption.
class LineSearchStallError : public std::runtime_error {
 public:
  explicit LineSearchStallError(const std::string& msg) : std::runtime_error(msg) {}
};

// Implicit fixed-point iteration failed to reach its tolerance.
class NoConvergenceError : public std::runtime_error {
 public:
  explicit NoConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Trace verification requires an oracle with a known solution.
class MissingSolutionError : public std::invalid_argument {
 public:
  explicit MissingSolutionError(const std::string& msg) : std::invalid_argument(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ipc
