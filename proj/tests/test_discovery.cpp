#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "lumpchain/discovery.hpp"
#include "lumpchain/oracle.hpp"

using namespace lumpchain;
using fixtures::blocks;

namespace {

const EigenspaceGroup& group_near(const std::vector<EigenspaceGroup>& groups, double lambda) {
  for (const auto& g : groups)
    if (std::abs(g.eigenvalue - lambda) < 1e-8) return g;
  throw std::runtime_error("no group near eigenvalue");
}

// |<a, b>| / (|a| |b|); 1 means parallel
double alignment(const Eigen::VectorXcd& a, const Eigen::VectorXd& b) {
  return std::abs(a.dot(b.cast<std::complex<double>>())) / (a.norm() * b.norm());
}

std::vector<Partition> partitions_of(const DiscoveryResult& r) {
  std::vector<Partition> out;
  for (const auto& c : r.lumpings) out.push_back(c.partition);
  return out;
}

}  // namespace

TEST_CASE("induced partitions of closed-form vectors") {
  const Eigen::MatrixXd t = fixtures::example2_vectors();
  CHECK(induced_partition(Eigen::MatrixXcd(t.col(7).cast<std::complex<double>>()), 1e-7) ==
        blocks(8, {{1, 2, 3, 4}, {5, 6, 7, 8}}));
  CHECK(induced_partition(Eigen::MatrixXcd(t.col(0).cast<std::complex<double>>()), 1e-7) ==
        Partition::single_lump(8));
  CHECK(induced_partition(Eigen::MatrixXcd(t.col(6).cast<std::complex<double>>()), 1e-7) ==
        blocks(8, {{1, 2}, {3, 4}, {5, 6, 7, 8}}));
}

TEST_CASE("induced partitions of computed simple groups") {
  const auto groups = group_eigenvalues(eigensystem(fixtures::stochastic(fixtures::example2())));
  CHECK(induced_partition(group_near(groups, 1.0), 1e-7) == Partition::single_lump(8));
  CHECK(induced_partition(group_near(groups, 0.1), 1e-7) == blocks(8, {{1, 2, 3, 4}, {5, 6, 7, 8}}));
  CHECK(induced_partition(group_near(groups, -0.2), 1e-7) == blocks(8, {{1, 2}, {3, 4}, {5, 6, 7, 8}}));
  CHECK(induced_partition(group_near(groups, -0.5), 1e-7) == blocks(8, {{1, 2, 3, 4}, {5, 6}, {7, 8}}));
}

TEST_CASE("rotation_search recovers the combinations of the degenerate pairs") {
  const auto groups = group_eigenvalues(eigensystem(fixtures::stochastic(fixtures::example2())));
  const Eigen::MatrixXd t = fixtures::example2_vectors();
  const auto& g34 = group_near(groups, -0.25 / fixtures::c1());
  const auto& g56 = group_near(groups, 0.25 / fixtures::c2());

  const auto r8 = rotation_search(g34, blocks(8, {{1, 3}, {2, 4}, {5, 6}, {7}, {8}}), 1e-7);
  REQUIRE(r8.has_value());
  REQUIRE(r8->vectors.cols() == 1);
  CHECK(alignment(r8->vectors.col(0), t.col(2) + t.col(3)) == doctest::Approx(1.0).epsilon(1e-10));

  const auto r9 = rotation_search(g56, blocks(8, {{1, 4}, {2, 3}, {5}, {6}, {7, 8}}), 1e-7);
  REQUIRE(r9.has_value());
  REQUIRE(r9->vectors.cols() == 1);
  CHECK(alignment(r9->vectors.col(0), t.col(4) + t.col(5)) == doctest::Approx(1.0).epsilon(1e-10));

  const auto full = rotation_search(g34, Partition::singletons(8), 1e-7);
  REQUIRE(full.has_value());
  CHECK(full->vectors.cols() == 2);

  CHECK_FALSE(rotation_search(g34, Partition::single_lump(8), 1e-7).has_value());
}

TEST_CASE("rotation probes visit the pure and mixed directions") {
  const auto groups = group_eigenvalues(eigensystem(fixtures::stochastic(fixtures::example2())));
  const auto& g34 = group_near(groups, -0.25 / fixtures::c1());
  bool capped = false;
  const auto probes = rotation_probes(g34, 1e-7, 10000, capped);
  CHECK_FALSE(capped);
  auto has = [&](const Partition& p) { return std::find(probes.begin(), probes.end(), p) != probes.end(); };
  // u3 alone, u4 alone, u3+u4, u3-u4
  CHECK(has(blocks(8, {{1, 2}, {3}, {4}, {5, 8}, {6, 7}})));
  CHECK(has(blocks(8, {{1}, {2}, {3, 4}, {5, 7}, {6, 8}})));
  CHECK(has(blocks(8, {{1, 3}, {2, 4}, {5, 6}, {7}, {8}})));
  CHECK(has(blocks(8, {{1, 4}, {2, 3}, {5}, {6}, {7, 8}})));

  bool tight = false;
  const auto few = rotation_probes(g34, 1e-7, 2, tight);
  CHECK(tight);
  CHECK(few.size() <= 2);
}

TEST_CASE("example 2 reproduces the ten lumpings") {
  const auto p = fixtures::stochastic(fixtures::example2());
  const auto res = discover(p);
  CHECK(partitions_of(res) == fixtures::example2_lumpings());
  CHECK(res.degenerate);
  CHECK_FALSE(res.completeness_guaranteed);
  CHECK_FALSE(res.zeta_applied.has_value());
  for (const auto& c : res.lumpings) {
    CHECK(c.verified);
    CHECK(c.max_deviation <= 1e-9);
    CHECK(c.generator_count == c.partition.num_lumps());
  }
  // {1,2}{3,4}{5,6}{7,8} needs four generators from four distinct simple groups
  const auto& s5 = res.lumpings[4];
  CHECK(s5.partition == blocks(8, {{1, 2}, {3, 4}, {5, 6}, {7, 8}}));
  CHECK(s5.generating_set.size() == 4);
  for (const auto& gb : s5.generating_set) CHECK_FALSE(gb.rotated);
}

TEST_CASE("generate_candidates contains the ten lumpings") {
  const auto groups = group_eigenvalues(eigensystem(fixtures::stochastic(fixtures::example2())));
  const auto cs = generate_candidates(groups, DiscoveryConfig{});
  for (const auto& want : fixtures::example2_lumpings()) {
    const bool found = std::any_of(cs.candidates.begin(), cs.candidates.end(),
                                   [&](const LumpingCandidate& c) { return c.partition == want; });
    CHECK(found);
  }
  CHECK_FALSE(cs.overflow);
}

TEST_CASE("closure and subset enumeration agree") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + rng() % 4;
    const auto part = fixtures::random_partition(rng, n, 1 + rng() % n);
    const auto p = fixtures::stochastic(fixtures::planted(rng, part));
    DiscoveryConfig closure;
    closure.exhaustive_subset_limit = 0;
    DiscoveryConfig subsets;
    subsets.exhaustive_subset_limit = 64;
    CHECK(partitions_of(discover(p, closure)) == partitions_of(discover(p, subsets)));
  }
  const auto ex2 = fixtures::stochastic(fixtures::example2());
  DiscoveryConfig closure;
  closure.exhaustive_subset_limit = 0;
  CHECK(partitions_of(discover(ex2, closure)) == fixtures::example2_lumpings());
}

TEST_CASE("example 1 discovery") {
  const auto p = fixtures::stochastic(fixtures::example1(0.3, 0.2, 0.5));
  const auto res = discover(p);
  const std::vector<Partition> want{Partition::single_lump(3), blocks(3, {{1, 2}, {3}}), Partition::singletons(3)};
  CHECK(partitions_of(res) == want);
  CHECK(res.completeness_guaranteed);
  CHECK(res.warnings.empty());
}

TEST_CASE("identity reports the degenerate regime") {
  const auto p = fixtures::stochastic(Eigen::MatrixXd::Identity(4, 4));
  const auto res = discover(p);
  CHECK(res.degenerate);
  CHECK_FALSE(res.completeness_guaranteed);
  CHECK_FALSE(res.warnings.empty());
  for (const auto& c : res.lumpings) CHECK(is_lumpable(p, c.partition).lumpable);
  CHECK(res.lumpings.front().partition == Partition::single_lump(4));

  DiscoveryConfig tiny;
  tiny.max_candidates = 3;
  const auto capped = discover(p, tiny);
  CHECK(capped.overflow);
  CHECK_FALSE(capped.completeness_guaranteed);
  CHECK(capped.lumpings.front().partition == Partition::single_lump(4));
}

TEST_CASE("rank-deficient input is perturbed first") {
  std::mt19937_64 rng(9);
  const auto part = blocks(5, {{1, 2}, {3, 4, 5}});
  const auto p = fixtures::stochastic(fixtures::planted(rng, part, true));
  const auto res = discover(p);
  REQUIRE(res.zeta_applied.has_value());
  CHECK(*res.zeta_applied == 0.5);
  const auto found = partitions_of(res);
  CHECK(std::find(found.begin(), found.end(), part) != found.end());
  CHECK(!res.warnings.empty());
}

TEST_CASE("non-diagonalizable input is refused") {
  Eigen::MatrixXd j(3, 3);
  j << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 1.0;
  try {
    discover(fixtures::stochastic(j));
    FAIL("expected NotDiagonalizable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotDiagonalizable);
  }
}

TEST_CASE("config validation") {
  DiscoveryConfig bad;
  bad.element_tol = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  DiscoveryConfig caps;
  caps.max_candidates = 0;
  CHECK_THROWS_AS(caps.validate(), Error);
}

TEST_CASE("converse witness") {
  const auto ex1 = fixtures::stochastic(fixtures::example1(0.3, 0.2, 0.5));
  const auto one = converse_witness(ex1, Partition::single_lump(3));
  REQUIRE(one.vectors.cols() == 1);
  CHECK(std::abs(one.eigenvalues(0) - 1.0) <= 1e-12);
  CHECK((one.vectors.col(0).array() - one.vectors(0, 0)).abs().maxCoeff() <= 1e-12);

  const auto two = converse_witness(ex1, blocks(3, {{1, 2}, {3}}));
  REQUIRE(two.vectors.cols() == 2);
  std::vector<double> ev{two.eigenvalues(0).real(), two.eigenvalues(1).real()};
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(0.25));
  CHECK(ev[1] == doctest::Approx(1.0));
  for (Eigen::Index k = 0; k < 2; ++k) {
    const Eigen::VectorXcd r = ex1.matrix().cast<std::complex<double>>() * two.vectors.col(k) -
                               two.eigenvalues(k) * two.vectors.col(k);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(two.vectors(0, k) - two.vectors(1, k)) <= 1e-12);
  }

  // lifted vectors of {1,2,3,4}{5,6,7,8} span u^1 and u^8
  const auto ex2 = fixtures::stochastic(fixtures::example2());
  const auto w = converse_witness(ex2, blocks(8, {{1, 2, 3, 4}, {5, 6, 7, 8}}));
  REQUIRE(w.vectors.cols() == 2);
  const Eigen::MatrixXd t = fixtures::example2_vectors();
  Eigen::MatrixXcd span(8, 2);
  span.col(0) = t.col(0).cast<std::complex<double>>();
  span.col(1) = t.col(7).cast<std::complex<double>>();
  const Eigen::MatrixXcd coeff = span.colPivHouseholderQr().solve(w.vectors);
  CHECK((span * coeff - w.vectors).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(converse_witness(ex1, blocks(3, {{1, 3}, {2}})), NotLumpableError);
}
