#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opv {

enum class ErrorKind {
  NonHermitian,
  NumericalFailure,
  SpectrumOutOfDomain,
  SingularT,
  SingularV,
  DimensionMismatch,
  NotPositiveDefinite,
  WeightOutOfRange,
  ZeroParameter,
  UnknownFunction,
  InvalidParameter,
  DomainViolation,
  NonPositiveInput,
  AnchorOutOfDomain,
  NotDifferentiable,
  ZeroVector,
  GenerationExhausted,
  UnboundName,
  RequirementViolated,
  SyntaxError,
  ArityMismatch,
  TypeError,
  InvalidInput,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SpectrumOutOfDomain: return "SpectrumOutOfDomain";
    case ErrorKind::SingularT: return "SingularT";
    case ErrorKind::SingularV: return "SingularV";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorKind::ZeroParameter: return "ZeroParameter";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::AnchorOutOfDomain: return "AnchorOutOfDomain";
    case ErrorKind::NotDifferentiable: return "NotDifferentiable";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::UnboundName: return "UnboundName";
    case ErrorKind::RequirementViolated: return "RequirementViolated";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace opv
