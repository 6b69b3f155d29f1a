#pragma once

#include <stdexcept>
#include <string>

namespace iabsim {

// Error categories map onto CLI exit codes (see harness).
enum class ErrorKind {
  Usage,
  Config,
  Consistency,
  Shape,
  Capacity,
  InsufficientData,
  Action,
  Format,
  UnsupportedVersion,
  Numeric,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when training produces a non-finite loss. Carries the step (or
// episode) at which divergence was detected.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long long step)
      : Error(ErrorKind::Numeric, what), step_(step) {}

  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

}  // namespace iabsim
