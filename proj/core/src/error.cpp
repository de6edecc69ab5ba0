#include "pdthreat/error.hpp"

namespace pdthreat {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kInvalidBeta: return "InvalidBeta";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kAllDirectionsDegenerate: return "AllDirectionsDegenerate";
    case ErrorCode::kEmptyDirectionSet: return "EmptyDirectionSet";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kWeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnmappedClass: return "UnmappedClass";
    case ErrorCode::kMalformedTree: return "MalformedTree";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kEmptyPartsList: return "EmptyPartsList";
    case ErrorCode::kNonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::kNonUnitDirection: return "NonUnitDirection";
    case ErrorCode::kPointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::kGeometryMismatch: return "GeometryMismatch";
    case ErrorCode::kNotImageDomain: return "NotImageDomain";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace pdthreat
