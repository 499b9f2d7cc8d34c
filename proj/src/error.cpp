#include "irm/error.hpp"

namespace irm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::MalformedProgram: return "malformed_program";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::ZeroUtility: return "zero_utility";
    case ErrorCode::EmptyPolytope: return "empty_polytope";
    case ErrorCode::DuplicatePoints: return "duplicate_points";
    case ErrorCode::NotAPermutation: return "not_a_permutation";
    case ErrorCode::NotDisplayed: return "not_displayed";
    case ErrorCode::StaleRound: return "stale_round";
    case ErrorCode::WrongFeedbackMode: return "wrong_feedback_mode";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::VersionMismatch: return "version_mismatch";
    case ErrorCode::CorruptRecord: return "corrupt_record";
  }
  return "unknown";
}

}  // namespace irm
