#include "whitneyopt/error.hpp"

namespace whitneyopt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SYNTAX_ERROR";
    case ErrorCode::kUnknownVariable: return "UNKNOWN_VARIABLE";
    case ErrorCode::kBadExponent: return "BAD_EXPONENT";
    case ErrorCode::kOrderMismatch: return "ORDER_MISMATCH";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kConstantMember: return "CONSTANT_MEMBER";
    case ErrorCode::kDuplicateMvar: return "DUPLICATE_MVAR";
    case ErrorCode::kNotEliminable: return "NOT_ELIMINABLE";
    case ErrorCode::kEmptyGstar: return "EMPTY_GSTAR";
    case ErrorCode::kRankDeficient: return "RANK_DEFICIENT";
    case ErrorCode::kNotRegular: return "NOT_REGULAR";
    case ErrorCode::kNoRealRoot: return "NO_REAL_ROOT";
    case ErrorCode::kAmbiguousRoot: return "AMBIGUOUS_ROOT";
    case ErrorCode::kDiverged: return "DIVERGED";
    case ErrorCode::kInvalidStart: return "INVALID_START";
    case ErrorCode::kStartOffManifold: return "START_OFF_MANIFOLD";
    case ErrorCode::kLiftCheckFailed: return "LIFT_CHECK_FAILED";
    case ErrorCode::kIo: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace whitneyopt
