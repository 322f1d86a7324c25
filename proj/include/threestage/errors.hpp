#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace threestage {

// Precondition violation on a numeric/structural input (bad index, dimension
// mismatch, non-normalized state, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Alice's and Bob's operators do not commute up to a global phase, so the
// exchange cannot return the secret.
class NonCommutingPairError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Session or experiment configuration names something that does not exist.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Command-line validation failure. The message names the offending flag.
class UsageError : public std::invalid_argument {
 public:
  UsageError(std::string flag, const std::string& message)
      : std::invalid_argument(flag + ": " + message), flag_(std::move(flag)) {}

  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

}  // namespace threestage
