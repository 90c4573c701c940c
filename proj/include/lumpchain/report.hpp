#pragma once

#include <string>
#include <vector>

#include "lumpchain/io.hpp"

namespace lumpchain {

inline constexpr const char* kReportSchema = "lumpchain.report/1";

/// Envelope for every CLI run. Serialization keeps field order fixed so
/// identical runs produce byte-identical output.
struct RunReport {
  std::string command;
  std::string input_digest;
  io::json config = io::json::object();
  io::json results = io::json::object();
  std::vector<std::string> warnings;
  /// Present when the run ended in a domain error.
  io::json error = nullptr;

  io::json to_json() const;
  /// Throws ParseError when required fields are missing or mistyped.
  static RunReport from_json(const io::json& j);
  std::string dump() const;
};

}  // namespace lumpchain
