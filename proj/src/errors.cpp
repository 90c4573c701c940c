#include "lumpchain/errors.hpp"

namespace lumpchain {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotLumpable: return "NotLumpable";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::ZetaOutOfRange: return "ZetaOutOfRange";
    case ErrorCode::NotDiagonalizable: return "NotDiagonalizable";
    case ErrorCode::CandidateOverflow: return "CandidateOverflow";
    case ErrorCode::GuardExceeded: return "GuardExceeded";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

NotLumpableError::NotLumpableError(double max_deviation)
    : Error(ErrorCode::NotLumpable,
            "partition is not a strong lumping (max deviation " + std::to_string(max_deviation) + ")"),
      max_deviation_(max_deviation) {}

GuardExceededError::GuardExceededError(std::size_t n, std::uint64_t partitions, std::uint64_t guard,
                                       bool overflowed)
    : Error(ErrorCode::GuardExceeded,
            overflowed ? "Bell number B_" + std::to_string(n) + " exceeds 64-bit range"
                       : "Bell number B_" + std::to_string(n) + " = " + std::to_string(partitions) +
                             " exceeds guard " + std::to_string(guard)),
      partitions_(partitions),
      overflowed_(overflowed) {}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(ErrorCode::ParseError,
            line == 0 ? what : what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

}  // namespace lumpchain
