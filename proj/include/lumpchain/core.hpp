#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lumpchain/errors.hpp"

namespace lumpchain {

inline constexpr double kDefaultValidateTol = 1e-9;
inline constexpr double kDefaultLumpTol = 1e-9;

/// Row-stochastic N x N transition matrix. Only obtainable through
/// validate_stochastic (or factories built on it), so holding one means the
/// entries are probabilities and every row sums to one.
class StochasticMatrix {
 public:
  std::size_t n() const noexcept { return static_cast<std::size_t>(p_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return p_; }
  double operator()(std::size_t i, std::size_t j) const { return p_(Eigen::Index(i), Eigen::Index(j)); }

 private:
  explicit StochasticMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {}
  friend StochasticMatrix validate_stochastic(const Eigen::MatrixXd& raw, double tol);

  Eigen::MatrixXd p_;
};

/// Partition of {0..n-1} held as a restricted-growth string: the first
/// occurrence of each lump label is the smallest unused label.
class Partition {
 public:
  Partition() = default;

  /// Canonicalizes arbitrary labels; equal blocks give equal assignments.
  static Partition from_labels(std::span<const std::size_t> labels);
  /// Blocks of 0-based state indices; they must be nonempty, disjoint and cover {0..n-1}.
  static Partition from_blocks(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks);
  static Partition single_lump(std::size_t n);
  static Partition singletons(std::size_t n);

  std::size_t n() const noexcept { return assignment_.size(); }
  std::size_t num_lumps() const noexcept { return num_lumps_; }
  std::size_t lump_of(std::size_t state) const { return assignment_.at(state); }
  const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }

  /// 0-based members of each lump, lumps in label order, members ascending.
  std::vector<std::vector<std::size_t>> blocks() const;
  /// N x M 0/1 membership matrix.
  Eigen::MatrixXd membership_matrix() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.assignment_ <=> b.assignment_; }

 private:
  std::vector<std::size_t> assignment_;
  std::size_t num_lumps_ = 0;
};

/// Ordering used for every reported list of partitions: fewer lumps first,
/// then lexicographic on the canonical assignment.
bool lump_count_order(const Partition& a, const Partition& b);

struct PartitionHash {
  std::size_t operator()(const Partition& p) const noexcept;
};

struct ReducedChain {
  Partition partition;
  Eigen::MatrixXd matrix;  // M x M
};

/// Probability vector over states.
class Distribution {
 public:
  /// Validates nonnegativity and unit sum within tol.
  explicit Distribution(std::vector<double> values, double tol = kDefaultValidateTol);
  static Distribution point_mass(std::size_t n, std::size_t state);

  std::size_t n() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// One step of the chain, x P.
  Distribution step(const StochasticMatrix& p) const;

 private:
  struct Unchecked {};
  Distribution(std::vector<double> values, Unchecked) : values_(std::move(values)) {}
  friend Distribution project_distribution(const Distribution&, const Partition&);

  std::vector<double> values_;
};

struct LumpabilityResult {
  bool lumpable = false;
  double max_deviation = 0.0;
};

StochasticMatrix validate_stochastic(const Eigen::MatrixXd& raw, double tol = kDefaultValidateTol);

/// Exact strong-lumpability test: for every lump pair (k, l) the row sums
/// s_i = sum_{j in L_l} p_ij must agree over i in L_k. The reported deviation
/// is the largest spread max_i s_i - min_i s_i over all pairs.
LumpabilityResult is_lumpable(const StochasticMatrix& p, const Partition& part, double tol = kDefaultLumpTol);

/// Quotient transition matrix; each entry is the lump-average of the
/// block row sums. Throws NotLumpableError when the deviation exceeds tol.
ReducedChain reduce(const StochasticMatrix& p, const Partition& part, double tol = kDefaultLumpTol);

Distribution project_distribution(const Distribution& x, const Partition& part);

/// Coarsest common refinement: i ~ j iff i ~ j in both p and q.
Partition partition_meet(const Partition& p, const Partition& q);

/// Blocks of the lumped column sums, P * Pi.
Eigen::MatrixXd block_row_sums(const StochasticMatrix& p, const Partition& part);

}  // namespace lumpchain
