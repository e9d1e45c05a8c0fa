#pragma once

#include <stdexcept>
#include <string>

namespace ftdo {

enum class ErrorCode {
  SelfLoop,
  OutOfRange,
  MalformedLine,
  DuplicateEdge,
  DegenerateCut,
  EmptyGraph,
  InvalidDeletion,
  BudgetExceeded,
  DecodeFailure,
  UnknownEdge,
  DegreeTooLow,
  SamplerExhausted,
  InvalidEvent,
  DeletionBudgetExceeded,
  InfeasibleParams,
  CorruptData,
};

const char *error_code_name(ErrorCode code);

/// Every library failure is reported through this exception type; `code()`
/// identifies the failure class so callers can branch without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace ftdo
