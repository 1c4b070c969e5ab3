#pragma once

#include <stdexcept>
#include <string>

namespace summands {

enum class ErrorCode {
  DivisionByZero,
  DescriptorMismatch,
  NotAnExtension,
  RingMismatch,
  NotGraded,
  MixedHomogeneity,
  BoundExceeded,
  ShapeMismatch,
  NotMinimal,
  GradingInvalid,
  UnsupportedExtension,
  IdempotencyCheckFailed,
  ResourceLimit,
  CharZero,
  NonIntegralDegrees,
  SyntaxError,
  SemanticError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace summands
