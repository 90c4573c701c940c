#include "lumpchain/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "union_find.hpp"

namespace lumpchain {

namespace {

using cplx = std::complex<double>;

// Elements below this (relative to unit max-norm) do not fix the phase.
constexpr double kPhaseElementFloor = 1e-8;

bool eigen_order(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

/// Single-linkage clusters of the spectrum, each cluster's members ascending.
std::vector<std::vector<std::size_t>> cluster_spectrum(const Eigen::VectorXcd& values, double tol) {
  const std::size_t n = std::size_t(values.size());
  detail::UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values(Eigen::Index(i)) - values(Eigen::Index(j))) <= tol) uf.unite(i, j);
    }
  }
  return uf.classes();
}

cplx cluster_mean(const Eigen::VectorXcd& values, const std::vector<std::size_t>& members) {
  cplx sum = 0.0;
  for (std::size_t m : members) sum += values(Eigen::Index(m));
  return sum / double(members.size());
}

/// Unit max-norm, first non-negligible element real positive.
Eigen::VectorXcd normalize_vector(const Eigen::VectorXcd& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return v;
  Eigen::VectorXcd out = v / scale;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::abs(out(i)) > kPhaseElementFloor) {
      out *= std::conj(out(i)) / std::abs(out(i));
      break;
    }
  }
  return out;
}

struct NullSpace {
  Eigen::MatrixXcd vectors;
  double residual = 0.0;
};

// The d right singular vectors of P - lambda I with the smallest singular values.
NullSpace null_space(const Eigen::MatrixXd& p, cplx lambda, std::size_t d, bool real) {
  const Eigen::Index n = p.rows();
  NullSpace out;
  if (real) {
    Eigen::MatrixXd shifted = p - lambda.real() * Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullV);
    out.vectors = svd.matrixV().rightCols(Eigen::Index(d)).cast<cplx>();
    out.residual = svd.singularValues()(n - Eigen::Index(d));
  } else {
    Eigen::MatrixXcd shifted = p.cast<cplx>() - lambda * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    out.vectors = svd.matrixV().rightCols(Eigen::Index(d));
    out.residual = svd.singularValues()(n - Eigen::Index(d));
  }
  return out;
}

Eigen::MatrixXcd gather_columns(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXcd out(m.rows(), Eigen::Index(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(Eigen::Index(k)) = m.col(Eigen::Index(cols[k]));
  return out;
}

Eigen::MatrixXcd gather_rows(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXcd out(Eigen::Index(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(Eigen::Index(k)) = m.row(Eigen::Index(rows[k]));
  return out;
}

/// Orthonormal real basis of span{Re V, Im V} with `rank` columns, scaled to
/// unit max-norm. A single column gets the sign convention instead.
Eigen::MatrixXd real_span_basis(const Eigen::MatrixXcd& v, std::size_t rank) {
  Eigen::MatrixXd stacked(v.rows(), 2 * v.cols());
  stacked << v.real(), v.imag();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
  Eigen::MatrixXd basis = svd.matrixU().leftCols(Eigen::Index(rank));
  if (rank == 1) return normalize_vector(basis.col(0).cast<cplx>()).real();
  return basis / basis.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd complex_span_basis(const Eigen::MatrixXcd& v) {
  if (v.cols() == 1) return normalize_vector(v.col(0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v, Eigen::ComputeThinU);
  Eigen::MatrixXcd basis = svd.matrixU();
  return basis / basis.cwiseAbs().maxCoeff();
}

}  // namespace

const char* to_string(EigenspaceKind kind) {
  switch (kind) {
    case EigenspaceKind::RealSimple: return "real-simple";
    case EigenspaceKind::RealDegenerate: return "real-degenerate";
    case EigenspaceKind::ComplexPair: return "complex-pair";
  }
  return "unknown";
}

bool EigenSystem::rank_deficient() const { return min_singular_value <= 1e3 * spectral_tol; }

double EigenSystem::reconstruction_error(const Eigen::MatrixXd& p) const {
  const Eigen::MatrixXcd rebuilt = right_vectors * eigenvalues.asDiagonal() * left_vectors;
  return (rebuilt - p.cast<cplx>()).cwiseAbs().maxCoeff();
}

double EigenSystem::biorthonormality_error() const {
  const Eigen::Index n = Eigen::Index(this->n);
  return (left_vectors * right_vectors - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

EigenSystem eigensystem(const StochasticMatrix& p, double spectral_tol, double cluster_tol) {
  const Eigen::MatrixXd& pm = p.matrix();
  const std::size_t n = p.n();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(pm, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigenvalue iteration did not converge");
  const Eigen::VectorXcd raw = solver.eigenvalues();

  struct Entry {
    cplx value;
    Eigen::VectorXcd vector;
  };
  std::vector<Entry> entries;
  entries.reserve(n);
  double residual = 0.0;

  const auto clusters = cluster_spectrum(raw, cluster_tol);
  std::vector<cplx> means(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) means[c] = cluster_mean(raw, clusters[c]);

  std::vector<bool> done(clusters.size(), false);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (done[c]) continue;
    done[c] = true;
    const std::size_t d = clusters[c].size();
    const bool real = std::abs(means[c].imag()) <= cluster_tol;
    const cplx lambda = real ? cplx(means[c].real(), 0.0) : means[c];
    NullSpace ns = null_space(pm, lambda, d, real);
    residual = std::max(residual, ns.residual);
    if (real) {
      for (Eigen::Index k = 0; k < ns.vectors.cols(); ++k) entries.push_back({lambda, ns.vectors.col(k)});
      continue;
    }
    // Conjugate partner: same size, mean closest to conj(lambda).
    std::size_t partner = clusters.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < clusters.size(); ++o) {
      if (done[o] || clusters[o].size() != d) continue;
      const double dist = std::abs(means[o] - std::conj(lambda));
      if (dist < best) best = dist, partner = o;
    }
    if (partner == clusters.size() || best > 10.0 * cluster_tol + 1e3 * spectral_tol) {
      throw Error(ErrorCode::EigenFailure, "complex eigenvalue without conjugate partner");
    }
    done[partner] = true;
    for (Eigen::Index k = 0; k < ns.vectors.cols(); ++k) {
      entries.push_back({lambda, ns.vectors.col(k)});
      entries.push_back({std::conj(lambda), ns.vectors.col(k).conjugate()});
    }
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return eigen_order(a.value, b.value); });

  EigenSystem es;
  es.n = n;
  es.spectral_tol = spectral_tol;
  es.null_space_residual = residual;
  es.eigenvalues.resize(Eigen::Index(n));
  es.right_vectors.resize(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t k = 0; k < n; ++k) {
    es.eigenvalues(Eigen::Index(k)) = entries[k].value;
    es.right_vectors.col(Eigen::Index(k)) = normalize_vector(entries[k].vector);
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> vsvd(es.right_vectors);
  const auto& sv = vsvd.singularValues();
  const double smin = sv(sv.size() - 1);
  es.condition_estimate = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  es.diagonalizable = residual <= std::sqrt(spectral_tol) && es.condition_estimate <= 1e-4 / spectral_tol;
  es.left_vectors = es.right_vectors.fullPivLu().inverse();

  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(pm);
  es.min_singular_value = psvd.singularValues()(Eigen::Index(n) - 1);
  return es;
}

std::vector<EigenspaceGroup> group_eigenvalues(const EigenSystem& es, double group_tol) {
  const auto clusters = cluster_spectrum(es.eigenvalues, group_tol);
  std::vector<cplx> means(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) means[c] = cluster_mean(es.eigenvalues, clusters[c]);

  std::vector<EigenspaceGroup> groups;
  std::vector<bool> done(clusters.size(), false);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (done[c]) continue;
    done[c] = true;
    const bool real = std::abs(means[c].imag()) <= group_tol;
    EigenspaceGroup g;
    if (real) {
      g.members = clusters[c];
      g.eigenvalue = cplx(means[c].real(), 0.0);
      g.dimension = g.members.size();
      g.kind = g.dimension == 1 ? EigenspaceKind::RealSimple : EigenspaceKind::RealDegenerate;
    } else {
      // Fold the conjugate cluster into this one; upper half carries the basis.
      std::size_t partner = clusters.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < clusters.size(); ++o) {
        if (done[o] || clusters[o].size() != clusters[c].size()) continue;
        const double dist = std::abs(means[o] - std::conj(means[c]));
        if (dist < best) best = dist, partner = o;
      }
      if (partner == clusters.size()) {
        throw Error(ErrorCode::EigenFailure, "complex eigenvalue group without conjugate partner");
      }
      done[partner] = true;
      const std::size_t upper = means[c].imag() > 0.0 ? c : partner;
      const std::size_t lower = upper == c ? partner : c;
      g.eigenvalue = means[upper];
      g.kind = EigenspaceKind::ComplexPair;
      g.dimension = 2 * clusters[upper].size();
      g.members = clusters[upper];
      g.members.insert(g.members.end(), clusters[lower].begin(), clusters[lower].end());
      std::sort(g.members.begin(), g.members.end());

      const Eigen::MatrixXcd vu = gather_columns(es.right_vectors, clusters[upper]);
      const Eigen::MatrixXcd wu = gather_rows(es.left_vectors, clusters[upper]);
      g.complex_basis = complex_span_basis(vu);
      g.complex_left_basis = (wu * g.complex_basis).inverse() * wu;
    }
    const Eigen::MatrixXcd v = gather_columns(es.right_vectors, g.members);
    const Eigen::MatrixXcd w = gather_rows(es.left_vectors, g.members);
    g.basis = real_span_basis(v, g.dimension);
    const Eigen::MatrixXcd coeff = w * g.basis.cast<cplx>();
    g.left_basis = (coeff.inverse() * w).real();
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(),
            [](const EigenspaceGroup& a, const EigenspaceGroup& b) { return a.members.front() < b.members.front(); });
  return groups;
}

StochasticMatrix perturb(const StochasticMatrix& p, double zeta) {
  if (!(zeta >= 0.0 && zeta < 1.0)) {
    throw Error(ErrorCode::ZetaOutOfRange, "zeta must lie in [0, 1), got " + std::to_string(zeta));
  }
  const Eigen::Index n = Eigen::Index(p.n());
  return validate_stochastic((1.0 - zeta) * p.matrix() + zeta * Eigen::MatrixXd::Identity(n, n),
                             kDefaultValidateTol);
}

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

bool spectrum_subset_check(const Eigen::VectorXcd& full, const Eigen::MatrixXd& reduced, double tol) {
  const Eigen::VectorXcd sub = eigenvalues_of(reduced);
  for (Eigen::Index i = 0; i < sub.size(); ++i) {
    if ((full.array() - sub(i)).abs().minCoeff() > tol) return false;
  }
  return true;
}

bool spectrum_subset_check(const StochasticMatrix& p, const ReducedChain& reduced, double tol) {
  return spectrum_subset_check(eigenvalues_of(p.matrix()), reduced.matrix, tol);
}

}  // namespace lumpchain
