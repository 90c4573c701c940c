#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "lumpchain/core.hpp"

namespace lumpchain {

inline constexpr double kDefaultSpectralTol = 1e-10;
inline constexpr double kDefaultGroupTol = 1e-8;
inline constexpr double kDefaultZeta = 0.5;

/// Full eigendecomposition P = U diag(lambda) V with V = U^{-1}, so left and
/// right vectors are biorthonormal by construction.
///
/// Ordering is by decreasing |lambda|, then decreasing real part, then
/// decreasing imaginary part. Each right vector has unit max-norm and its
/// first non-negligible element is real positive. Eigenvalues that agree to
/// within the clustering tolerance share one eigenvalue (the cluster mean) and
/// get their right vectors from an SVD null space of P - lambda I, which stays
/// well conditioned when the eigenvalue is exactly degenerate.
struct EigenSystem {
  std::size_t n = 0;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_vectors;  // column beta is u^beta
  Eigen::MatrixXcd left_vectors;   // row beta is v^beta
  bool diagonalizable = true;
  double condition_estimate = 1.0;  // 2-norm condition of the right-vector matrix
  /// max over clusters of the d-th smallest singular value of P - lambda I.
  double null_space_residual = 0.0;
  /// smallest singular value of P; tiny means rank-deficient
  double min_singular_value = 0.0;
  double spectral_tol = kDefaultSpectralTol;

  bool rank_deficient() const;
  /// max |(sum_beta lambda u v) - P| entrywise
  double reconstruction_error(const Eigen::MatrixXd& p) const;
  /// max |v^beta u^gamma - delta|
  double biorthonormality_error() const;
};

enum class EigenspaceKind { RealSimple, RealDegenerate, ComplexPair };

const char* to_string(EigenspaceKind kind);

/// Real invariant subspace for one eigenvalue (or one conjugate pair).
///
/// `basis` is the real N x d form used for element comparison: orthonormal
/// columns rescaled to unit max-norm, or for a simple real eigenvalue the
/// normalized eigenvector itself. For a complex pair, `complex_basis` holds
/// the d/2 eigenvectors of the eigenvalue with positive imaginary part and
/// rotations happen over complex coefficients. `left_basis` and
/// `complex_left_basis` are dual: left_basis * basis = I.
struct EigenspaceGroup {
  std::complex<double> eigenvalue;
  std::size_t dimension = 1;
  EigenspaceKind kind = EigenspaceKind::RealSimple;
  std::vector<std::size_t> members;  // indices into EigenSystem's ordering
  Eigen::MatrixXd basis;
  Eigen::MatrixXd left_basis;
  Eigen::MatrixXcd complex_basis;
  Eigen::MatrixXcd complex_left_basis;

  bool is_complex() const noexcept { return kind == EigenspaceKind::ComplexPair; }
  /// Dimension of the coefficient space rotations act on.
  std::size_t working_dimension() const noexcept { return is_complex() ? dimension / 2 : dimension; }
};

/// `cluster_tol` merges numerically split copies of a degenerate eigenvalue
/// before the eigenvectors are extracted.
EigenSystem eigensystem(const StochasticMatrix& p, double spectral_tol = kDefaultSpectralTol,
                        double cluster_tol = kDefaultGroupTol);

/// Single-linkage clustering of the spectrum at group_tol; conjugate pairs
/// fold into one ComplexPair group. Groups appear in eigenvalue order.
std::vector<EigenspaceGroup> group_eigenvalues(const EigenSystem& es, double group_tol = kDefaultGroupTol);

/// (1 - zeta) P + zeta I; has the same strong lumpings as P for 0 <= zeta < 1.
StochasticMatrix perturb(const StochasticMatrix& p, double zeta);

/// Eigenvalues of a dense real matrix. Throws EigenFailure on non-convergence.
Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& m);

/// True iff every eigenvalue of the reduced matrix is within tol of an
/// eigenvalue of P.
bool spectrum_subset_check(const StochasticMatrix& p, const ReducedChain& reduced, double tol);
bool spectrum_subset_check(const Eigen::VectorXcd& full, const Eigen::MatrixXd& reduced, double tol);

}  // namespace lumpchain
