#include "lumpchain/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

namespace lumpchain::io {

namespace {

struct Position {
  std::size_t line;
  std::size_t column;
};

Position position_of(std::string_view text, std::size_t offset) {
  Position pos{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

[[noreturn]] void fail_at(std::string_view text, std::size_t offset, const std::string& what) {
  const Position pos = position_of(text, offset);
  throw ParseError(what, pos.line, pos.column);
}

std::size_t first_significant(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    } else if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else {
      break;
    }
  }
  return i;
}

bool is_separator(char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail_at(text, e.byte == 0 ? 0 : e.byte - 1, std::string("invalid JSON: ") + e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("JSON matrix must be a nonempty array of rows", 0, 0);
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) throw ParseError("JSON matrix row " + std::to_string(r + 1) + " is not an array", 0, 0);
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) {
      throw ParseError("JSON matrix row " + std::to_string(r + 1) + " has " + std::to_string(j[r].size()) +
                           " entries, expected " + std::to_string(cols), 0, 0);
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ParseError("JSON matrix entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                             ") is not a number", 0, 0);
      }
      m(Eigen::Index(r), Eigen::Index(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

std::vector<std::size_t> labels_from_json(const json& a, std::size_t n) {
  if (!a.is_array() || a.size() != n) {
    throw ParseError("assignment must be an array of " + std::to_string(n) + " labels", 0, 0);
  }
  std::vector<std::size_t> labels;
  for (const auto& v : a) {
    if (!v.is_number_unsigned()) throw ParseError("assignment labels must be nonnegative integers", 0, 0);
    labels.push_back(v.get<std::size_t>());
  }
  return labels;
}

Partition blocks_from_json(const json& b, std::size_t n) {
  if (!b.is_array()) throw ParseError("blocks must be an array of arrays", 0, 0);
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& block : b) {
    if (!block.is_array()) throw ParseError("blocks must be an array of arrays", 0, 0);
    auto& out = blocks.emplace_back();
    for (const auto& s : block) {
      if (!s.is_number_unsigned() || s.get<std::size_t>() == 0) {
        throw ParseError("block members must be 1-based state indices", 0, 0);
      }
      out.push_back(s.get<std::size_t>() - 1);
    }
  }
  try {
    return Partition::from_blocks(n, blocks);
  } catch (const Error& e) {
    throw ParseError(e.what(), 0, 0);
  }
}

std::size_t parse_index(std::string_view text, std::size_t& i, const char* what) {
  if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) fail_at(text, i, std::string("expected ") + what);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
  if (ec != std::errc()) fail_at(text, i, std::string("invalid ") + what);
  i = std::size_t(ptr - text.data());
  return value;
}

Partition parse_block_string(std::string_view text, std::size_t n) {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> owner(n, 0);  // 1 + block index, 0 when unseen
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_space();
  while (i < text.size()) {
    if (text[i] != '{') fail_at(text, i, "expected '{'");
    ++i;
    auto& block = blocks.emplace_back();
    while (true) {
      skip_space();
      const std::size_t at = i;
      const std::size_t s = parse_index(text, i, "state index");
      if (s == 0 || s > n) fail_at(text, at, "state " + std::to_string(s) + " out of range 1.." + std::to_string(n));
      if (owner[s - 1] != 0) fail_at(text, at, "state " + std::to_string(s) + " appears twice");
      owner[s - 1] = blocks.size();
      block.push_back(s - 1);
      skip_space();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '}') {
        ++i;
        break;
      }
      fail_at(text, i, "expected ',' or '}'");
    }
    skip_space();
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (owner[s] == 0) fail_at(text, text.size(), "state " + std::to_string(s + 1) + " is not in any lump");
  }
  return Partition::from_blocks(n, blocks);
}

Partition parse_label_string(std::string_view text, std::size_t n) {
  std::vector<std::size_t> labels;
  std::size_t i = 0;
  while (true) {
    while (i < text.size() && is_separator(text[i])) ++i;
    if (i >= text.size()) break;
    labels.push_back(parse_index(text, i, "lump label"));
    if (i < text.size() && !is_separator(text[i])) fail_at(text, i, "unexpected character");
  }
  if (labels.size() != n) {
    fail_at(text, text.size(), "expected " + std::to_string(n) + " lump labels, found " + std::to_string(labels.size()));
  }
  return Partition::from_labels(labels);
}

}  // namespace

Eigen::MatrixXd parse_matrix(std::string_view text) {
  const std::size_t start = first_significant(text);
  if (start < text.size() && text[start] == '[') return matrix_from_json(parse_json(text.substr(start)));

  std::vector<std::vector<double>> rows;
  std::size_t line_start = 0;
  std::size_t line_no = 0;
  while (line_start <= text.size()) {
    ++line_no;
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<double> row;
    std::size_t i = 0;
    while (true) {
      while (i < line.size() && is_separator(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_separator(line[j])) ++j;
      double value = 0.0;
      const char* first = line.data() + i;
      const char* last = line.data() + j;
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) {
        throw ParseError("invalid number '" + std::string(line.substr(i, j - i)) + "'", line_no, i + 1);
      }
      row.push_back(value);
      i = j;
    }
    if (!row.empty()) {
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(rows.front().size()), line_no, 1);
      }
      rows.push_back(std::move(row));
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  if (rows.empty()) throw ParseError("matrix input is empty", line_no, 1);

  Eigen::MatrixXd m(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(Eigen::Index(r), Eigen::Index(c)) = rows[r][c];
  }
  return m;
}

Partition parse_partition(std::string_view text, std::size_t n) {
  const std::size_t start = first_significant(text);
  if (start >= text.size()) throw ParseError("partition input is empty", 1, 1);
  const std::string_view body = text.substr(start);
  const bool json_object = body.front() == '{' && body.find('"') != std::string_view::npos;
  if (body.front() == '[' || json_object) {
    const json j = parse_json(body);
    if (j.is_array()) return blocks_from_json(j, n);
    if (j.contains("assignment")) return Partition::from_labels(labels_from_json(j.at("assignment"), n));
    if (j.contains("blocks")) return blocks_from_json(j.at("blocks"), n);
    throw ParseError("JSON partition needs \"assignment\" or \"blocks\"", 0, 0);
  }
  if (body.front() == '{') return parse_block_string(text, n);
  return parse_label_string(text, n);
}

std::string format_blocks(const Partition& part) {
  std::string out;
  for (const auto& block : part.blocks()) {
    out += '{';
    for (std::size_t k = 0; k < block.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(block[k] + 1);
    }
    out += '}';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string matrix_digest(const Eigen::MatrixXd& m) {
  std::string canon = std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      canon += buf;
      canon += c + 1 < m.cols() ? ' ' : '\n';
    }
  }
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(canon.data(), canon.size(), hash, &len, EVP_sha256(), nullptr);
  std::string hex = "sha256:";
  static constexpr char kHex[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[hash[i] >> 4];
    hex += kHex[hash[i] & 15];
  }
  return hex;
}

json to_json(const Partition& part) {
  json blocks = json::array();
  for (const auto& block : part.blocks()) {
    json b = json::array();
    for (std::size_t s : block) b.push_back(s + 1);
    blocks.push_back(std::move(b));
  }
  json j;
  j["lumps"] = part.num_lumps();
  j["blocks"] = std::move(blocks);
  j["assignment"] = part.assignment();
  return j;
}

json to_json(std::complex<double> z) {
  json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXcd& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  json j;
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

}  // namespace lumpchain::io
