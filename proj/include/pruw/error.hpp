#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pruw {

enum class ErrorCode {
  kCompositeModulus,
  kFieldTooSmall,
  kDivisionByZero,
  kInfeasibleCode,
  kBadIndex,
  kDimensionMismatch,
  kSingularSystem,
  kBadNullSet,
  kDegenerateHomogeneous,
  kInfeasibleAllocation,
  kOutOfRange,
  kIndivisibleL,
  kInvalidInput,
  kInvariantViolation,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCompositeModulus: return "CompositeModulus";
    case ErrorCode::kFieldTooSmall: return "FieldTooSmall";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kInfeasibleCode: return "InfeasibleCode";
    case ErrorCode::kBadIndex: return "BadIndex";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kBadNullSet: return "BadNullSet";
    case ErrorCode::kDegenerateHomogeneous: return "DegenerateHomogeneous";
    case ErrorCode::kInfeasibleAllocation: return "InfeasibleAllocation";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kIndivisibleL: return "IndivisibleL";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace pruw
