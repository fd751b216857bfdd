#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lowmach {

enum class ErrorCode {
  DimensionMismatch,
  ParityMismatch,
  NonzeroVerticalMean,
  NonzeroMeanRHS,
  NonpositiveDensity,
  DensityOutOfBounds,
  CFLViolation,
  UnknownFamily,
  InvalidParams,
  InvalidConfig,
  InsufficientData,
  NonpositiveData,
  TimeMismatch,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParityMismatch: return "ParityMismatch";
    case ErrorCode::NonzeroVerticalMean: return "NonzeroVerticalMean";
    case ErrorCode::NonzeroMeanRHS: return "NonzeroMeanRHS";
    case ErrorCode::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorCode::DensityOutOfBounds: return "DensityOutOfBounds";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonpositiveData: return "NonpositiveData";
    case ErrorCode::TimeMismatch: return "TimeMismatch";
  }
  return "Unknown";
}

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

/// Single exception type for every failure in the library; `code()` tells
/// callers which precondition or runtime check tripped.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lowmach
