#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lumpchain {

enum class ErrorCode {
  NotSquare,
  NegativeEntry,
  RowSumViolation,
  DimensionMismatch,
  NotLumpable,
  EigenFailure,
  ZetaOutOfRange,
  NotDiagonalizable,
  CandidateOverflow,
  GuardExceeded,
  Overflow,
  InsufficientData,
  InvalidArgument,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Base of every error raised by the library. `code()` identifies the
/// failure class; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NotLumpableError : public Error {
 public:
  explicit NotLumpableError(double max_deviation);
  double max_deviation() const noexcept { return max_deviation_; }

 private:
  double max_deviation_;
};

class GuardExceededError : public Error {
 public:
  GuardExceededError(std::size_t n, std::uint64_t partitions, std::uint64_t guard, bool overflowed);
  std::uint64_t partitions() const noexcept { return partitions_; }
  bool overflowed() const noexcept { return overflowed_; }

 private:
  std::uint64_t partitions_;
  bool overflowed_;
};

/// Input syntax error; line and column are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace lumpchain
