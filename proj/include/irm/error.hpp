#pragma once

#include <stdexcept>
#include <string>

namespace irm {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  MalformedProgram,
  EmptyInput,
  ZeroUtility,
  EmptyPolytope,
  DuplicatePoints,
  NotAPermutation,
  NotDisplayed,
  StaleRound,
  WrongFeedbackMode,
  NotFound,
  Io,
  Parse,
  VersionMismatch,
  CorruptRecord,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so that
/// the service layer can map it onto a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace irm
