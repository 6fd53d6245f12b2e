#include "weyl1d/error.hpp"

namespace weyl1d {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::InteriorZeroDensity: return "InteriorZeroDensity";
    case ErrorCode::ConvexityViolation: return "ConvexityViolation";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::SingularMass: return "SingularMass";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::BeyondResolvedRange: return "BeyondResolvedRange";
    case ErrorCode::UnresolvedTail: return "UnresolvedTail";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::InsufficientSpectrum: return "InsufficientSpectrum";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace weyl1d
