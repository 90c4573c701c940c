#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lumpchain/core.hpp"
#include "lumpchain/spectral.hpp"

namespace lumpchain {

inline constexpr double kDefaultElementTol = 1e-7;

struct DiscoveryConfig {
  double element_tol = kDefaultElementTol;
  double group_tol = kDefaultGroupTol;
  double spectral_tol = kDefaultSpectralTol;
  double zeta = kDefaultZeta;
  std::size_t max_rotation_patterns = 10'000;
  std::size_t max_candidates = 100'000;
  /// Seed sets up to this size are also combined by enumerating every subset.
  std::size_t exhaustive_subset_limit = 12;
  /// Workers for candidate verification; 0 runs inline.
  std::size_t threads = 0;

  /// Throws InvalidArgument unless tolerances are positive and caps >= 1.
  void validate() const;
};

/// Eigenvectors drawn from one eigenspace group that are constant on the
/// candidate's lumps. `coefficients` are relative to the group's working
/// basis (the real basis, or the complex basis for a conjugate pair).
struct GeneratorBlock {
  std::size_t group = 0;
  std::complex<double> eigenvalue;
  EigenspaceKind kind = EigenspaceKind::RealSimple;
  std::size_t group_dimension = 1;
  /// Real dimension contributed (twice the complex count for a pair).
  std::size_t count = 0;
  /// True when only a proper subspace of a degenerate group is used.
  bool rotated = false;
  Eigen::MatrixXcd coefficients;
  Eigen::MatrixXcd vectors;  // N x k, each column unit max-norm
};

/// Left eigenvectors of one group that the membership matrix annihilates.
struct AnnihilatedBlock {
  std::size_t group = 0;
  std::complex<double> eigenvalue;
  Eigen::MatrixXcd left_vectors;  // rows; conjugates implied for a pair
};

struct LumpingCandidate {
  Partition partition;
  std::vector<GeneratorBlock> generating_set;
  std::vector<AnnihilatedBlock> complement;
  std::size_t generator_count = 0;
  bool verified = false;
  double max_deviation = 0.0;
};

struct CandidateSet {
  std::vector<LumpingCandidate> candidates;  // unverified, canonical order
  std::size_t seed_count = 0;
  std::size_t lattice_size = 0;
  bool overflow = false;          // lattice closure hit max_candidates
  bool rotation_capped = false;   // some group hit max_rotation_patterns
};

struct DiscoveryResult {
  std::vector<LumpingCandidate> lumpings;  // verified only, canonical order
  EigenSystem eigensystem;
  std::vector<EigenspaceGroup> groups;
  std::optional<double> zeta_applied;
  std::size_t seed_count = 0;
  std::size_t lattice_size = 0;
  std::size_t candidates_examined = 0;
  bool overflow = false;
  bool rotation_capped = false;
  bool degenerate = false;
  /// Only claimed for simple spectra with no cap reached.
  bool completeness_guaranteed = false;
  std::vector<std::string> warnings;
};

/// States i, j share a lump iff rows i and j of the group basis agree within
/// element_tol in max-norm; near-equal chains merge by single linkage.
Partition induced_partition(const EigenspaceGroup& group, double element_tol);
Partition induced_partition(const Eigen::MatrixXcd& vectors, double element_tol);

struct Rotation {
  Eigen::MatrixXcd coefficients;             // working_dimension x k, orthonormal
  Eigen::MatrixXcd complement_coefficients;  // working_dimension x (working_dimension - k)
  Eigen::MatrixXcd vectors;                  // N x k, unit max-norm columns
};

/// Largest subspace of the group's span whose vectors are constant on every
/// lump of target. Empty when only the zero vector qualifies.
std::optional<Rotation> rotation_search(const EigenspaceGroup& group, const Partition& target, double element_tol);

/// Partitions reachable inside one degenerate group by successively forcing
/// pairs of rows equal. The first element is the group's own induced
/// partition. `capped` is set when the search hit max_patterns.
std::vector<Partition> rotation_probes(const EigenspaceGroup& group, double element_tol, std::size_t max_patterns,
                                       bool& capped);

/// Counts the eigenvectors constant on `part` across all groups and records
/// generating and annihilated sets. Returns nullopt when the count is below
/// the lump count.
std::optional<LumpingCandidate> assess_candidate(const std::vector<EigenspaceGroup>& groups, const Partition& part,
                                                 double element_tol);

/// Seeds from per-group induced partitions and rotation probes, closes them
/// under meet, and keeps partitions that pass the count condition.
CandidateSet generate_candidates(const std::vector<EigenspaceGroup>& groups, const DiscoveryConfig& cfg);

/// Full pipeline; every lumping in the result passed the exact check on p.
DiscoveryResult discover(const StochasticMatrix& p, const DiscoveryConfig& cfg = {},
                         double lump_tol = kDefaultLumpTol);

struct ConverseWitness {
  Eigen::VectorXcd eigenvalues;  // M
  Eigen::MatrixXcd vectors;      // N x M, constant on lumps
};

/// Eigenvectors of the reduced chain lifted back to the full state space.
ConverseWitness converse_witness(const StochasticMatrix& p, const Partition& part, double tol = kDefaultLumpTol);

}  // namespace lumpchain
