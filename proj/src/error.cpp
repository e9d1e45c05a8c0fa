#include "ftdo/error.hpp"

namespace ftdo {

const char *error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::SelfLoop:
    return "SelfLoop";
  case ErrorCode::OutOfRange:
    return "OutOfRange";
  case ErrorCode::MalformedLine:
    return "MalformedLine";
  case ErrorCode::DuplicateEdge:
    return "DuplicateEdge";
  case ErrorCode::DegenerateCut:
    return "DegenerateCut";
  case ErrorCode::EmptyGraph:
    return "EmptyGraph";
  case ErrorCode::InvalidDeletion:
    return "InvalidDeletion";
  case ErrorCode::BudgetExceeded:
    return "BudgetExceeded";
  case ErrorCode::DecodeFailure:
    return "DecodeFailure";
  case ErrorCode::UnknownEdge:
    return "UnknownEdge";
  case ErrorCode::DegreeTooLow:
    return "DegreeTooLow";
  case ErrorCode::SamplerExhausted:
    return "SamplerExhausted";
  case ErrorCode::InvalidEvent:
    return "InvalidEvent";
  case ErrorCode::DeletionBudgetExceeded:
    return "DeletionBudgetExceeded";
  case ErrorCode::InfeasibleParams:
    return "InfeasibleParams";
  case ErrorCode::CorruptData:
    return "CorruptData";
  }
  return "Unknown";
}

} // namespace ftdo
