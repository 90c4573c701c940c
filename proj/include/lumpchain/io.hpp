#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "lumpchain/core.hpp"

namespace lumpchain::io {

using json = nlohmann::ordered_json;

/// Text rows (whitespace or comma separated, '#' starts a comment) or a JSON
/// array of arrays. Throws ParseError with 1-based line/column.
Eigen::MatrixXd parse_matrix(std::string_view text);

/// Accepts "{1,2}{3,4}" blocks (1-based states), a restricted-growth string
/// "0 0 1 1", a JSON array of 1-based blocks, or a JSON object carrying
/// "assignment" or "blocks".
Partition parse_partition(std::string_view text, std::size_t n);

/// "{1,2}{3,4}"
std::string format_blocks(const Partition& part);

std::string read_file(const std::string& path);

/// SHA-256 (hex) of the matrix serialized with 17 significant digits.
std::string matrix_digest(const Eigen::MatrixXd& m);

json to_json(const Partition& part);
json to_json(std::complex<double> z);
json to_json(const Eigen::MatrixXd& m);
json vector_to_json(const Eigen::VectorXcd& v);

}  // namespace lumpchain::io
