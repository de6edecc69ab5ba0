#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdthreat {

enum class ErrorCode {
  kBadMagic,
  kHeaderMismatch,
  kNonFiniteValue,
  kLabelOutOfRange,
  kIoError,
  kInvariantViolation,
  kZeroVector,
  kEmptyInput,
  kEmptyClass,
  kInvalidBeta,
  kDimensionMismatch,
  kAllDirectionsDegenerate,
  kEmptyDirectionSet,
  kEmptyMask,
  kWeightOutOfRange,
  kShapeMismatch,
  kUnmappedClass,
  kMalformedTree,
  kSizeMismatch,
  kEmptyPartsList,
  kNonPositiveEpsilon,
  kNonUnitDirection,
  kPointOutsideDomain,
  kGeometryMismatch,
  kNotImageDomain,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pdthreat
