#include "lumpchain/report.hpp"

namespace lumpchain {

io::json RunReport::to_json() const {
  io::json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["input_digest"] = input_digest;
  j["config"] = config;
  j["results"] = results;
  j["warnings"] = warnings;
  if (!error.is_null()) j["error"] = error;
  return j;
}

RunReport RunReport::from_json(const io::json& j) {
  auto require = [&](const char* key, auto check) -> const io::json& {
    if (!j.contains(key) || !check(j.at(key))) {
      throw ParseError(std::string("report field '") + key + "' missing or mistyped", 0, 0);
    }
    return j.at(key);
  };
  auto is_string = [](const io::json& v) { return v.is_string(); };
  auto is_object = [](const io::json& v) { return v.is_object(); };
  if (require("schema", is_string).get<std::string>() != kReportSchema) {
    throw ParseError("unknown report schema", 0, 0);
  }
  RunReport r;
  r.command = require("command", is_string).get<std::string>();
  r.input_digest = require("input_digest", is_string).get<std::string>();
  r.config = require("config", is_object);
  r.results = require("results", is_object);
  for (const auto& w : require("warnings", [](const io::json& v) { return v.is_array(); })) {
    if (!w.is_string()) throw ParseError("warnings must be strings", 0, 0);
    r.warnings.push_back(w.get<std::string>());
  }
  if (j.contains("error")) r.error = j.at("error");
  return r;
}

std::string RunReport::dump() const { return to_json().dump(2) + "\n"; }

}  // namespace lumpchain
