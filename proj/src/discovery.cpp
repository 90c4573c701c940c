#include "lumpchain/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_set>

#include <Eigen/SVD>

#include "parallel.hpp"
#include "union_find.hpp"

namespace lumpchain {

namespace {

using cplx = std::complex<double>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct Subspace {
  Mat<Scalar> null;        // m x k
  Mat<Scalar> complement;  // m x (m - k)
};

// Coefficients w with (row_i - row_j) . w = 0 whenever i and j share a lump.
template <class Scalar>
Subspace<Scalar> constrained_subspace(const Mat<Scalar>& basis, const Partition& target, double tol) {
  const Eigen::Index m = basis.cols();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& block : target.blocks()) {
    for (std::size_t k = 1; k < block.size(); ++k) pairs.emplace_back(block.front(), block[k]);
  }
  Subspace<Scalar> out;
  if (pairs.empty()) {
    out.null = Mat<Scalar>::Identity(m, m);
    out.complement.resize(m, 0);
    return out;
  }
  Mat<Scalar> c(Eigen::Index(pairs.size()), m);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    c.row(Eigen::Index(r)) = basis.row(Eigen::Index(pairs[r].first)) - basis.row(Eigen::Index(pairs[r].second));
  }
  Eigen::JacobiSVD<Mat<Scalar>> svd(c, Eigen::ComputeFullV);
  const double threshold = tol * std::sqrt(double(pairs.size()));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > threshold) ++rank;
  }
  out.null = svd.matrixV().rightCols(m - rank);
  out.complement = svd.matrixV().leftCols(rank);
  return out;
}

Eigen::VectorXcd normalize_column(const Eigen::VectorXcd& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return v;
  Eigen::VectorXcd out = v / scale;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::abs(out(i)) > 1e-8) {
      out *= std::conj(out(i)) / std::abs(out(i));
      break;
    }
  }
  return out;
}

Eigen::MatrixXcd normalize_columns(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < m.cols(); ++k) out.col(k) = normalize_column(m.col(k));
  return out;
}

struct BlockAssessment {
  std::size_t count = 0;
  Eigen::MatrixXcd coefficients;
  Eigen::MatrixXcd vectors;
  Eigen::MatrixXcd annihilated;
};

template <class Scalar>
BlockAssessment assess_block(const Mat<Scalar>& basis, const Mat<Scalar>& left, const Partition& part, double tol) {
  const Subspace<Scalar> s = constrained_subspace(basis, part, tol);
  BlockAssessment out;
  out.count = std::size_t(s.null.cols());
  out.coefficients = s.null.template cast<cplx>();
  out.vectors = normalize_columns((basis * s.null).template cast<cplx>());
  out.annihilated = (s.complement.adjoint() * left).template cast<cplx>();
  return out;
}

BlockAssessment assess_group(const EigenspaceGroup& g, const Partition& part, double tol) {
  if (g.is_complex()) {
    BlockAssessment b = assess_block<cplx>(g.complex_basis, g.complex_left_basis, part, tol);
    b.count *= 2;
    return b;
  }
  return assess_block<double>(g.basis, g.left_basis, part, tol);
}

class PartitionSet {
 public:
  bool insert(const Partition& p) {
    if (!seen_.insert(p).second) return false;
    items_.push_back(p);
    return true;
  }
  bool contains(const Partition& p) const { return seen_.count(p) != 0; }
  std::size_t size() const { return items_.size(); }
  const Partition& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Partition>& items() const { return items_; }

 private:
  std::unordered_set<Partition, PartitionHash> seen_;
  std::vector<Partition> items_;
};

}  // namespace

void DiscoveryConfig::validate() const {
  if (!(element_tol > 0.0) || !(group_tol > 0.0) || !(spectral_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "discovery tolerances must be positive");
  }
  if (max_rotation_patterns < 1 || max_candidates < 1) {
    throw Error(ErrorCode::InvalidArgument, "discovery caps must be at least 1");
  }
  if (!(zeta >= 0.0 && zeta < 1.0)) throw Error(ErrorCode::ZetaOutOfRange, "zeta must lie in [0, 1)");
}

Partition induced_partition(const Eigen::MatrixXcd& vectors, double element_tol) {
  const std::size_t n = std::size_t(vectors.rows());
  const double scale = vectors.size() == 0 ? 0.0 : vectors.cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd v = scale > 0.0 ? Eigen::MatrixXcd(vectors / scale) : vectors;
  detail::UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = (v.row(Eigen::Index(i)) - v.row(Eigen::Index(j))).cwiseAbs().maxCoeff();
      if (dist <= element_tol) uf.unite(i, j);
    }
  }
  const auto labels = uf.labels();
  return Partition::from_labels(labels);
}

Partition induced_partition(const EigenspaceGroup& group, double element_tol) {
  return induced_partition(Eigen::MatrixXcd(group.basis.cast<cplx>()), element_tol);
}

std::optional<Rotation> rotation_search(const EigenspaceGroup& group, const Partition& target, double element_tol) {
  if (target.n() != std::size_t(group.basis.rows())) {
    throw Error(ErrorCode::DimensionMismatch, "rotation_search: partition size differs from state count");
  }
  Rotation r;
  if (group.is_complex()) {
    const auto s = constrained_subspace<cplx>(group.complex_basis, target, element_tol);
    r.coefficients = s.null;
    r.complement_coefficients = s.complement;
    r.vectors = normalize_columns(group.complex_basis * s.null);
  } else {
    const auto s = constrained_subspace<double>(group.basis, target, element_tol);
    r.coefficients = s.null.cast<cplx>();
    r.complement_coefficients = s.complement.cast<cplx>();
    r.vectors = normalize_columns((group.basis * s.null).cast<cplx>());
  }
  if (r.coefficients.cols() == 0) return std::nullopt;
  return r;
}

namespace {

template <class Scalar>
std::vector<Partition> probe_patterns(const Mat<Scalar>& basis, double tol, std::size_t max_patterns, bool& capped) {
  PartitionSet visited;
  std::deque<std::size_t> queue;
  visited.insert(induced_partition(Eigen::MatrixXcd(basis.template cast<cplx>()), tol));
  queue.push_back(0);
  while (!queue.empty()) {
    const Partition current = visited[queue.front()];
    queue.pop_front();
    const Mat<Scalar> z = constrained_subspace(basis, current, tol).null;
    if (z.cols() <= 1) continue;
    const Mat<Scalar> restricted = basis * z;
    const auto blocks = current.blocks();
    for (std::size_t a = 0; a < blocks.size(); ++a) {
      for (std::size_t b = a + 1; b < blocks.size(); ++b) {
        const Mat<Scalar> diff =
            restricted.row(Eigen::Index(blocks[a].front())) - restricted.row(Eigen::Index(blocks[b].front()));
        Eigen::JacobiSVD<Mat<Scalar>> svd(diff, Eigen::ComputeFullV);
        if (svd.singularValues()(0) <= tol) continue;
        const Mat<Scalar> forced = restricted * svd.matrixV().rightCols(z.cols() - 1);
        const Partition next = induced_partition(Eigen::MatrixXcd(forced.template cast<cplx>()), tol);
        if (visited.contains(next)) continue;
        if (visited.size() >= max_patterns) {
          capped = true;
          return visited.items();
        }
        visited.insert(next);
        queue.push_back(visited.size() - 1);
      }
    }
  }
  return visited.items();
}

}  // namespace

std::vector<Partition> rotation_probes(const EigenspaceGroup& group, double element_tol, std::size_t max_patterns,
                                       bool& capped) {
  if (group.is_complex()) return probe_patterns<cplx>(group.complex_basis, element_tol, max_patterns, capped);
  return probe_patterns<double>(group.basis, element_tol, max_patterns, capped);
}

std::optional<LumpingCandidate> assess_candidate(const std::vector<EigenspaceGroup>& groups, const Partition& part,
                                                 double element_tol) {
  LumpingCandidate cand;
  cand.partition = part;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const EigenspaceGroup& g = groups[gi];
    BlockAssessment b = assess_group(g, part, element_tol);
    if (b.count > 0) {
      GeneratorBlock gen;
      gen.group = gi;
      gen.eigenvalue = g.eigenvalue;
      gen.kind = g.kind;
      gen.group_dimension = g.dimension;
      gen.count = b.count;
      gen.rotated = b.count < g.dimension;
      gen.coefficients = std::move(b.coefficients);
      gen.vectors = std::move(b.vectors);
      cand.generating_set.push_back(std::move(gen));
    }
    if (b.count < g.dimension) {
      cand.complement.push_back({gi, g.eigenvalue, std::move(b.annihilated)});
    }
    cand.generator_count += b.count;
  }
  if (cand.generator_count < part.num_lumps()) return std::nullopt;
  return cand;
}

CandidateSet generate_candidates(const std::vector<EigenspaceGroup>& groups, const DiscoveryConfig& cfg) {
  cfg.validate();
  CandidateSet out;
  if (groups.empty()) return out;
  const std::size_t n = std::size_t(groups.front().basis.rows());

  PartitionSet seeds;
  seeds.insert(Partition::single_lump(n));
  for (const EigenspaceGroup& g : groups) {
    if (g.working_dimension() == 1) {
      seeds.insert(induced_partition(g, cfg.element_tol));
      continue;
    }
    bool capped = false;
    for (const Partition& p : rotation_probes(g, cfg.element_tol, cfg.max_rotation_patterns, capped)) seeds.insert(p);
    out.rotation_capped = out.rotation_capped || capped;
  }
  seeds.insert(Partition::singletons(n));
  out.seed_count = seeds.size();

  PartitionSet lattice;
  auto add = [&](const Partition& p) {
    if (lattice.contains(p)) return;
    if (lattice.size() >= cfg.max_candidates) {
      out.overflow = true;
      return;
    }
    lattice.insert(p);
  };
  if (seeds.size() <= cfg.exhaustive_subset_limit) {
    const std::size_t s = seeds.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << s) && !out.overflow; ++mask) {
      std::optional<Partition> meet;
      for (std::size_t k = 0; k < s; ++k) {
        if (!(mask >> k & 1U)) continue;
        meet = meet ? partition_meet(*meet, seeds[k]) : seeds[k];
      }
      add(*meet);
    }
  } else {
    for (const Partition& p : seeds.items()) add(p);
    for (std::size_t i = 0; i < lattice.size() && !out.overflow; ++i) {
      for (std::size_t j = 0; j < i && !out.overflow; ++j) add(partition_meet(lattice[i], lattice[j]));
    }
  }
  out.lattice_size = lattice.size();

  for (const Partition& q : lattice.items()) {
    if (auto cand = assess_candidate(groups, q, cfg.element_tol)) out.candidates.push_back(std::move(*cand));
  }
  std::sort(out.candidates.begin(), out.candidates.end(), [](const LumpingCandidate& a, const LumpingCandidate& b) {
    return lump_count_order(a.partition, b.partition);
  });
  return out;
}

DiscoveryResult discover(const StochasticMatrix& p, const DiscoveryConfig& cfg, double lump_tol) {
  cfg.validate();
  DiscoveryResult res;
  res.eigensystem = eigensystem(p, cfg.spectral_tol, cfg.group_tol);
  if (res.eigensystem.rank_deficient()) {
    const StochasticMatrix shifted = perturb(p, cfg.zeta);
    res.eigensystem = eigensystem(shifted, cfg.spectral_tol, cfg.group_tol);
    res.zeta_applied = cfg.zeta;
    res.warnings.push_back("rank-deficient input: spectral search ran on (1-zeta)P + zeta I with zeta=" +
                           std::to_string(cfg.zeta));
  }
  if (!res.eigensystem.diagonalizable) {
    throw Error(ErrorCode::NotDiagonalizable,
                "transition matrix is not numerically diagonalizable (eigenvector condition " +
                    std::to_string(res.eigensystem.condition_estimate) + ", null-space residual " +
                    std::to_string(res.eigensystem.null_space_residual) + ")");
  }
  res.groups = group_eigenvalues(res.eigensystem, cfg.group_tol);

  CandidateSet cs = generate_candidates(res.groups, cfg);
  res.seed_count = cs.seed_count;
  res.lattice_size = cs.lattice_size;
  res.candidates_examined = cs.candidates.size();
  res.overflow = cs.overflow;
  res.rotation_capped = cs.rotation_capped;

  // The exact row-sum check on the unperturbed matrix decides.
  detail::parallel_for(cs.candidates.size(), cfg.threads, [&](std::size_t i) {
    const LumpabilityResult r = is_lumpable(p, cs.candidates[i].partition, lump_tol);
    cs.candidates[i].verified = r.lumpable;
    cs.candidates[i].max_deviation = r.max_deviation;
  });
  for (LumpingCandidate& c : cs.candidates) {
    if (c.verified) res.lumpings.push_back(std::move(c));
  }

  const Partition top = Partition::single_lump(p.n());
  const bool has_top = std::any_of(res.lumpings.begin(), res.lumpings.end(),
                                   [&](const LumpingCandidate& c) { return c.partition == top; });
  if (!has_top) {
    LumpingCandidate c = assess_candidate(res.groups, top, cfg.element_tol).value_or(LumpingCandidate{});
    c.partition = top;
    c.verified = true;
    c.max_deviation = is_lumpable(p, top, lump_tol).max_deviation;
    res.lumpings.push_back(std::move(c));
    std::sort(res.lumpings.begin(), res.lumpings.end(), [](const LumpingCandidate& a, const LumpingCandidate& b) {
      return lump_count_order(a.partition, b.partition);
    });
  }

  for (const EigenspaceGroup& g : res.groups) {
    if (g.working_dimension() > 1) res.degenerate = true;
  }
  res.completeness_guaranteed = !res.degenerate && !res.overflow && !res.rotation_capped;
  if (res.degenerate) {
    res.warnings.push_back(
        "degenerate eigenspace present: lumpings come from a bounded rotation search and the list is not "
        "guaranteed complete");
  }
  if (res.rotation_capped) {
    res.warnings.push_back("rotation search reached max_rotation_patterns=" +
                           std::to_string(cfg.max_rotation_patterns));
  }
  if (res.overflow) {
    res.warnings.push_back("CandidateOverflow: lattice closure reached max_candidates=" +
                           std::to_string(cfg.max_candidates) + "; results are partial");
  }
  return res;
}

ConverseWitness converse_witness(const StochasticMatrix& p, const Partition& part, double tol) {
  const ReducedChain reduced = reduce(p, part, tol);
  const StochasticMatrix small = validate_stochastic(reduced.matrix, std::max(1e-9, 10.0 * tol));
  const EigenSystem es = eigensystem(small);
  ConverseWitness w;
  w.eigenvalues = es.eigenvalues;
  w.vectors = part.membership_matrix().cast<cplx>() * es.right_vectors;
  return w;
}

}  // namespace lumpchain
