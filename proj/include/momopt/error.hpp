#pragma once

#include <stdexcept>
#include <string>

namespace momopt {

enum class ErrorCode {
  DegreeTooHigh,
  LengthMismatch,
  OrderTooSmall,
  EmptyGeneratorDegree,
  TooManyGenerators,
  CapExceeded,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Precondition failure raised by the library. Solver and extraction outcomes
/// are reported through status values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace momopt
