#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weyl1d {

enum class ErrorCode {
  DomainMismatch,
  InteriorZeroDensity,
  ConvexityViolation,
  OutOfDomain,
  InvalidParameter,
  DivisionByZero,
  EvaluationFailure,
  QuadratureNonConvergence,
  SingularMass,
  SolverFailure,
  BeyondResolvedRange,
  UnresolvedTail,
  HypothesisNotMet,
  InsufficientSpectrum,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// machine-readable part; the message names the offending value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace weyl1d
