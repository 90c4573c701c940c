#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lumpchain/core.hpp"

namespace lumpchain {

/// Name of the generator and uniform mapping used by simulate; echoed in
/// reports so runs can be reproduced.
inline constexpr const char* kRngAlgorithm = "mt19937_64/u53-v1";

struct Trajectory {
  std::vector<std::size_t> states;  // 0-based state indices
  std::uint64_t seed = 0;
};

/// Samples T states starting at x0 (0-based; the start counts as the first
/// state). Each step inverts the cumulative row of P at a 53-bit uniform.
Trajectory simulate(const StochasticMatrix& p, std::size_t x0, std::size_t length, std::uint64_t seed);

/// N x N one-step transition counts of a trajectory.
Eigen::MatrixXd transition_counts(const Trajectory& traj, std::size_t n);

struct MarkovTestResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double pvalue = 1.0;
};

/// Diagnostic only. Projects the trajectory through `part` and runs a
/// likelihood-ratio (G) test of second-order against first-order dependence
/// on the lumped alphabet, chi-square reference with M(M-1)^2 degrees of
/// freedom. Needs at least 100 M^2 steps (InsufficientData otherwise).
MarkovTestResult markov_quotient_statistic(const Trajectory& traj, const Partition& part);

}  // namespace lumpchain
