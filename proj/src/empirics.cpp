#include "lumpchain/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace lumpchain {

namespace {

double uniform53(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Trajectory simulate(const StochasticMatrix& p, std::size_t x0, std::size_t length, std::uint64_t seed) {
  const std::size_t n = p.n();
  if (x0 >= n) throw Error(ErrorCode::InvalidArgument, "initial state " + std::to_string(x0 + 1) + " out of range");
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "trajectory length must be at least 1");

  // Cumulative rows; the last positive entry of each row is the fallback so
  // rounding in the running sum never selects a zero-probability state.
  std::vector<std::vector<double>> cdf(n, std::vector<double>(n));
  std::vector<std::size_t> last_positive(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += p(i, j);
      cdf[i][j] = acc;
      if (p(i, j) > 0.0) last_positive[i] = j;
    }
  }

  std::mt19937_64 rng(seed);
  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(length);
  std::size_t state = x0;
  traj.states.push_back(state);
  for (std::size_t t = 1; t < length; ++t) {
    const double u = uniform53(rng);
    const auto& row = cdf[state];
    std::size_t next = std::size_t(std::upper_bound(row.begin(), row.end(), u) - row.begin());
    if (next > last_positive[state]) next = last_positive[state];
    state = next;
    traj.states.push_back(state);
  }
  return traj;
}

Eigen::MatrixXd transition_counts(const Trajectory& traj, std::size_t n) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t t = 1; t < traj.states.size(); ++t) {
    counts(Eigen::Index(traj.states[t - 1]), Eigen::Index(traj.states[t])) += 1.0;
  }
  return counts;
}

MarkovTestResult markov_quotient_statistic(const Trajectory& traj, const Partition& part) {
  const std::size_t m = part.num_lumps();
  if (traj.states.size() < 100 * m * m) {
    throw Error(ErrorCode::InsufficientData, "trajectory of length " + std::to_string(traj.states.size()) +
                                                 " is shorter than 100 M^2 = " + std::to_string(100 * m * m));
  }
  MarkovTestResult out;
  out.dof = m * (m - 1) * (m - 1);
  if (m == 1) return out;

  std::vector<std::size_t> y(traj.states.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (traj.states[t] >= part.n()) throw Error(ErrorCode::DimensionMismatch, "trajectory state outside partition");
    y[t] = part.lump_of(traj.states[t]);
  }
  std::vector<double> abc(m * m * m, 0.0), ab(m * m, 0.0), bc(m * m, 0.0), b_only(m, 0.0);
  for (std::size_t t = 2; t < y.size(); ++t) {
    const std::size_t a = y[t - 2], b = y[t - 1], c = y[t];
    abc[(a * m + b) * m + c] += 1.0;
    ab[a * m + b] += 1.0;
    bc[b * m + c] += 1.0;
    b_only[b] += 1.0;
  }
  double g = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      for (std::size_t c = 0; c < m; ++c) {
        const double nabc = abc[(a * m + b) * m + c];
        if (nabc == 0.0) continue;
        g += nabc * std::log(nabc * b_only[b] / (ab[a * m + b] * bc[b * m + c]));
      }
    }
  }
  out.statistic = std::max(0.0, 2.0 * g);
  out.pvalue = out.statistic > 0.0 ? boost::math::gamma_q(0.5 * double(out.dof), 0.5 * out.statistic) : 1.0;
  return out;
}

}  // namespace lumpchain
