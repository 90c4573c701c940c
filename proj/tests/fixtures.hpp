#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lumpchain/core.hpp"

namespace fixtures {

using lumpchain::Partition;
using lumpchain::StochasticMatrix;

inline StochasticMatrix stochastic(const Eigen::MatrixXd& m) { return lumpchain::validate_stochastic(m); }

// Three-state family with lumping {1,2}{3}; eigenvalues 1, 2a+b-1, (3c-1)/2.
inline Eigen::MatrixXd example1(double a, double b, double c) {
  Eigen::MatrixXd m(3, 3);
  m << a + b + (c - 1) / 2, 1 - a - b, (1 - c) / 2,
       -a + (c + 1) / 2, a, (1 - c) / 2,
       1 - b - c, b, c;
  return m;
}

// Eight-state chain with two degenerate eigenvalue pairs.
inline Eigen::MatrixXd example2(double a = 0.2, double b = 0.25) {
  Eigen::MatrixXd m(8, 8);
  m << 0, a, a, a, a, 0, a, 0,
       a, 0, a, a, 0, a, 0, a,
       a, a, 0, a, 0, a, a, 0,
       a, a, a, 0, a, 0, 0, a,
       b, 0, 0, b, 0, 0, b, b,
       0, b, b, 0, 0, 0, b, b,
       b, 0, b, 0, b, b, 0, 0,
       0, b, 0, b, b, b, 0, 0;
  return m;
}

// Closed forms for a=1/5, b=1/4, from the characteristic equations of the
// two-dimensional invariant blocks.
inline double c1() { return (-0.2 + std::sqrt(0.04 + 8 * 0.2 * 0.25)) / 0.8; }
inline double c2() { return (0.2 + std::sqrt(0.04 + 8 * 0.2 * 0.25)) / 0.8; }

// Columns u^1..u^8 of the eigenvector matrix, eigenvalues alongside.
inline Eigen::MatrixXd example2_vectors() {
  const double p = c1(), q = c2();
  Eigen::MatrixXd t(8, 8);
  t << 1, 0, 0, -1, 0, 1, -1, 1,
       1, 0, 0, 1, 0, -1, -1, 1,
       1, 0, -1, 0, -1, 0, 1, 1,
       1, 0, 1, 0, 1, 0, 1, 1,
       1, -1, -p, p, q, q, 0, -1.25,
       1, -1, p, -p, -q, -q, 0, -1.25,
       1, 1, p, p, -q, q, 0, -1.25,
       1, 1, -p, -p, q, -q, 0, -1.25;
  return t;
}

inline Eigen::VectorXd example2_eigenvalues() {
  Eigen::VectorXd v(8);
  v << 1, -0.5, -0.25 / c1(), -0.25 / c1(), 0.25 / c2(), 0.25 / c2(), -0.2, 0.1;
  return v;
}

inline Partition blocks(std::size_t n, std::vector<std::vector<std::size_t>> one_based) {
  for (auto& b : one_based)
    for (auto& s : b) --s;
  return Partition::from_blocks(n, one_based);
}

inline Partition labels(const std::vector<std::size_t>& l) { return Partition::from_labels(l); }

// Exhaustive brute-force listing computed independently for Example 2.
inline std::vector<Partition> example2_lumpings() {
  return {
      labels({0, 0, 0, 0, 0, 0, 0, 0}), labels({0, 0, 0, 0, 1, 1, 1, 1}), labels({0, 0, 0, 0, 1, 1, 2, 2}),
      labels({0, 0, 1, 1, 2, 2, 2, 2}), labels({0, 0, 1, 1, 2, 2, 3, 3}), labels({0, 0, 1, 2, 3, 4, 4, 3}),
      labels({0, 1, 0, 1, 2, 2, 3, 4}), labels({0, 1, 1, 0, 2, 3, 4, 4}), labels({0, 1, 2, 2, 3, 4, 3, 4}),
      labels({0, 1, 2, 3, 4, 5, 6, 7}),
  };
}

inline std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t k, double alpha = 1.0) {
  std::gamma_distribution<double> g(alpha, 1.0);
  std::vector<double> v(k);
  double s = 0;
  for (auto& x : v) s += (x = g(rng));
  for (auto& x : v) x /= s;
  return v;
}

inline Eigen::MatrixXd random_stochastic(std::mt19937_64& rng, std::size_t n, double alpha = 1.0) {
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dirichlet(rng, n, alpha);
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[j];
  }
  return m;
}

inline Partition random_partition(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<std::size_t> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = i < m ? i : std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
  std::shuffle(l.begin(), l.end(), rng);
  return Partition::from_labels(l);
}

// Lumpable by construction: every state of lump k sends R(k,l) into lump l,
// split across the members of l at random.
inline Eigen::MatrixXd planted(std::mt19937_64& rng, const Partition& part, bool replicate_rows = false) {
  const std::size_t n = part.n(), m = part.num_lumps();
  const Eigen::MatrixXd r = random_stochastic(rng, m);
  const auto bl = part.blocks();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = part.lump_of(i);
    for (std::size_t l = 0; l < m; ++l) {
      const auto split = dirichlet(rng, bl[l].size());
      for (std::size_t s = 0; s < bl[l].size(); ++s) p(i, bl[l][s]) = r(k, l) * split[s];
    }
  }
  if (replicate_rows) {
    for (const auto& b : bl)
      for (std::size_t s = 1; s < b.size(); ++s) p.row(b[s]) = p.row(b[0]);
  }
  return p;
}

inline double min_eigen_gap(const Eigen::VectorXcd& ev) {
  double gap = INFINITY;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) gap = std::min(gap, std::abs(ev(i) - ev(j)));
  return gap;
}

}  // namespace fixtures
