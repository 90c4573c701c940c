#include "lumpchain/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace lumpchain {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

void require_same_n(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

StochasticMatrix validate_stochastic(const Eigen::MatrixXd& raw, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "validation tolerance must be positive");
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw Error(ErrorCode::NotSquare, "matrix is " + std::to_string(raw.rows()) + "x" +
                                          std::to_string(raw.cols()) + ", expected nonempty square");
  }
  Eigen::MatrixXd p = raw;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      if (!std::isfinite(v) || v < -tol) {
        throw Error(ErrorCode::NegativeEntry, "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                  ") = " + std::to_string(v) + " is not a probability");
      }
      p(i, j) = std::max(v, 0.0);
    }
    const double sum = p.row(i).sum();
    if (std::abs(sum - 1.0) > tol) {
      throw Error(ErrorCode::RowSumViolation,
                  "row " + std::to_string(i + 1) + " sums to " + std::to_string(sum));
    }
    p.row(i) /= sum;
  }
  return StochasticMatrix(std::move(p));
}

Partition Partition::from_labels(std::span<const std::size_t> labels) {
  Partition out;
  out.assignment_.resize(labels.size());
  std::unordered_map<std::size_t, std::size_t> relabel;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(labels[i], relabel.size());
    out.assignment_[i] = it->second;
  }
  out.num_lumps_ = relabel.size();
  return out;
}

Partition Partition::from_blocks(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks) {
  std::vector<std::size_t> labels(n, kUnassigned);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw Error(ErrorCode::InvalidArgument, "empty lump");
    for (std::size_t s : blocks[b]) {
      if (s >= n) {
        throw Error(ErrorCode::InvalidArgument, "state " + std::to_string(s + 1) + " out of range 1.." + std::to_string(n));
      }
      if (labels[s] != kUnassigned) {
        throw Error(ErrorCode::InvalidArgument, "state " + std::to_string(s + 1) + " appears in two lumps");
      }
      labels[s] = b;
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (labels[s] == kUnassigned) {
      throw Error(ErrorCode::InvalidArgument, "state " + std::to_string(s + 1) + " is not covered");
    }
  }
  return from_labels(labels);
}

Partition Partition::single_lump(std::size_t n) {
  std::vector<std::size_t> labels(n, 0);
  return from_labels(labels);
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i;
  return from_labels(labels);
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
  std::vector<std::vector<std::size_t>> out(num_lumps_);
  for (std::size_t i = 0; i < assignment_.size(); ++i) out[assignment_[i]].push_back(i);
  return out;
}

Eigen::MatrixXd Partition::membership_matrix() const {
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(Eigen::Index(n()), Eigen::Index(num_lumps_));
  for (std::size_t i = 0; i < assignment_.size(); ++i) pi(Eigen::Index(i), Eigen::Index(assignment_[i])) = 1.0;
  return pi;
}

bool lump_count_order(const Partition& a, const Partition& b) {
  if (a.num_lumps() != b.num_lumps()) return a.num_lumps() < b.num_lumps();
  return a.assignment() < b.assignment();
}

std::size_t PartitionHash::operator()(const Partition& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (std::size_t v : p.assignment()) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

Distribution::Distribution(std::vector<double> values, double tol) : values_(std::move(values)) {
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < -tol) throw Error(ErrorCode::NegativeEntry, "distribution entry is negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw Error(ErrorCode::RowSumViolation, "distribution sums to " + std::to_string(sum));
  }
  for (double& v : values_) v = std::max(v, 0.0) / sum;
}

Distribution Distribution::point_mass(std::size_t n, std::size_t state) {
  std::vector<double> v(n, 0.0);
  v.at(state) = 1.0;
  return Distribution(std::move(v), Unchecked{});
}

Distribution Distribution::step(const StochasticMatrix& p) const {
  require_same_n(n(), p.n(), "Distribution::step");
  const Eigen::Map<const Eigen::RowVectorXd> x(values_.data(), Eigen::Index(values_.size()));
  const Eigen::RowVectorXd y = x * p.matrix();
  return Distribution(std::vector<double>(y.data(), y.data() + y.size()), Unchecked{});
}

Eigen::MatrixXd block_row_sums(const StochasticMatrix& p, const Partition& part) {
  require_same_n(p.n(), part.n(), "block_row_sums");
  const Eigen::Index n = Eigen::Index(p.n());
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, Eigen::Index(part.num_lumps()));
  for (Eigen::Index j = 0; j < n; ++j) {
    sums.col(Eigen::Index(part.lump_of(std::size_t(j)))) += p.matrix().col(j);
  }
  return sums;
}

LumpabilityResult is_lumpable(const StochasticMatrix& p, const Partition& part, double tol) {
  if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "lumpability tolerance must be nonnegative");
  const Eigen::MatrixXd sums = block_row_sums(p, part);
  const Eigen::Index m = sums.cols();
  Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::infinity());
  Eigen::MatrixXd hi = Eigen::MatrixXd::Constant(m, m, -std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < sums.rows(); ++i) {
    const Eigen::Index k = Eigen::Index(part.lump_of(std::size_t(i)));
    lo.row(k) = lo.row(k).cwiseMin(sums.row(i));
    hi.row(k) = hi.row(k).cwiseMax(sums.row(i));
  }
  const double dev = (hi - lo).maxCoeff();
  return {dev <= tol, dev};
}

ReducedChain reduce(const StochasticMatrix& p, const Partition& part, double tol) {
  const LumpabilityResult check = is_lumpable(p, part, tol);
  if (!check.lumpable) throw NotLumpableError(check.max_deviation);
  const Eigen::MatrixXd sums = block_row_sums(p, part);
  const Eigen::Index m = Eigen::Index(part.num_lumps());
  Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd sizes = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < sums.rows(); ++i) {
    const Eigen::Index k = Eigen::Index(part.lump_of(std::size_t(i)));
    reduced.row(k) += sums.row(i);
    sizes(k) += 1.0;
  }
  for (Eigen::Index k = 0; k < m; ++k) reduced.row(k) /= sizes(k);
  return {part, std::move(reduced)};
}

Distribution project_distribution(const Distribution& x, const Partition& part) {
  require_same_n(x.n(), part.n(), "project_distribution");
  std::vector<double> out(part.num_lumps(), 0.0);
  for (std::size_t i = 0; i < x.n(); ++i) out[part.lump_of(i)] += x[i];
  return Distribution(std::move(out), Distribution::Unchecked{});
}

Partition partition_meet(const Partition& p, const Partition& q) {
  require_same_n(p.n(), q.n(), "partition_meet");
  // Pair labels (a, b) encoded into one integer; from_labels canonicalizes.
  std::vector<std::size_t> labels(p.n());
  const std::size_t stride = q.num_lumps();
  for (std::size_t i = 0; i < p.n(); ++i) labels[i] = p.lump_of(i) * stride + q.lump_of(i);
  return Partition::from_labels(labels);
}

}  // namespace lumpchain
