#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "lumpchain/oracle.hpp"

using namespace lumpchain;
using fixtures::blocks;

TEST_CASE("bell numbers") {
  CHECK(bell_number(0) == 1);
  CHECK(bell_number(1) == 1);
  CHECK(bell_number(3) == 5);
  CHECK(bell_number(8) == 4140);
  CHECK(bell_number(12) == 4213597);
  CHECK(bell_number(25) == 4638590332229999353ULL);
  try {
    bell_number(26);
    FAIL("expected Overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("enumeration count matches bell numbers") {
  for (std::size_t n = 1; n <= 10; ++n) {
    auto it = enumerate_partitions(n);
    std::uint64_t count = 0;
    std::optional<Partition> prev;
    while (auto p = it.next()) {
      ++count;
      if (prev) CHECK(prev->assignment() < p->assignment());
      prev = std::move(p);
    }
    CHECK(count == bell_number(n));
  }
}

TEST_CASE("enumeration order") {
  auto two = enumerate_partitions(2);
  CHECK(*two.next() == Partition::single_lump(2));
  CHECK(*two.next() == Partition::singletons(2));
  CHECK_FALSE(two.next().has_value());

  auto three = enumerate_partitions(3);
  std::vector<Partition> all;
  while (auto p = three.next()) all.push_back(*p);
  REQUIRE(all.size() == 5);
  CHECK(all.front() == Partition::single_lump(3));
  CHECK(all.back() == Partition::singletons(3));
  CHECK(std::set<Partition>(all.begin(), all.end()).size() == 5);

  CHECK_THROWS_AS(PartitionIterator(0), Error);
}

TEST_CASE("brute force examples") {
  CHECK(brute_force_lumpings(fixtures::stochastic(fixtures::example2())) == fixtures::example2_lumpings());
  CHECK(brute_force_lumpings(fixtures::stochastic(fixtures::example2()), 1e-9, kDefaultGuard, 4) ==
        fixtures::example2_lumpings());

  const auto id = brute_force_lumpings(fixtures::stochastic(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(id.size() == 15);

  const std::vector<Partition> ex1{Partition::single_lump(3), blocks(3, {{1, 2}, {3}}), Partition::singletons(3)};
  CHECK(brute_force_lumpings(fixtures::stochastic(fixtures::example1(0.3, 0.2, 0.5))) == ex1);
}

TEST_CASE("guard") {
  const auto p = fixtures::stochastic(fixtures::example2());
  try {
    brute_force_lumpings(p, 1e-9, 4139);
    FAIL("expected GuardExceeded");
  } catch (const GuardExceededError& e) {
    CHECK(e.code() == ErrorCode::GuardExceeded);
    CHECK(e.partitions() == 4140);
    CHECK_FALSE(e.overflowed());
  }
  CHECK(brute_force_lumpings(p, 1e-9, 4140).size() == 10);

  const auto big = fixtures::stochastic(Eigen::MatrixXd::Identity(30, 30));
  try {
    brute_force_lumpings(big);
    FAIL("expected GuardExceeded");
  } catch (const GuardExceededError& e) {
    CHECK(e.overflowed());
  }
}

TEST_CASE("tolerance is monotone and trivial partitions always appear") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + rng() % 5;
    Eigen::MatrixXd m = fixtures::planted(rng, fixtures::random_partition(rng, n, 1 + rng() % n));
    // jitter so that some lumpings only pass at the looser tolerance
    m += 1e-6 * fixtures::random_stochastic(rng, n);
    m = m.array().colwise() / m.rowwise().sum().array();
    const auto p = fixtures::stochastic(m);
    const auto tight = brute_force_lumpings(p, 1e-9);
    const auto loose = brute_force_lumpings(p, 1e-5);
    const std::set<Partition> l(loose.begin(), loose.end());
    for (const auto& x : tight) CHECK(l.count(x) == 1);
    CHECK(tight.front() == Partition::single_lump(n));
    CHECK(tight.back() == Partition::singletons(n));
  }
}
