#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lumpchain/core.hpp"

namespace lumpchain {

inline constexpr std::uint64_t kDefaultGuard = 1'000'000;

/// Exact B_n from the Bell triangle. Throws Overflow past 64 bits (n > 25).
std::uint64_t bell_number(std::size_t n);

/// Streams every partition of {0..n-1} once, as restricted-growth strings in
/// lexicographic order: the single lump first, all singletons last.
class PartitionIterator {
 public:
  explicit PartitionIterator(std::size_t n);

  /// Next partition, or nullopt once the stream is exhausted.
  std::optional<Partition> next();
  std::size_t n() const noexcept { return n_; }

 private:
  bool advance();

  std::size_t n_;
  std::vector<std::size_t> cursor_;
  std::vector<std::size_t> prefix_max_;  // max(cursor_[0..i])
  bool started_ = false;
  bool done_ = false;
};

PartitionIterator enumerate_partitions(std::size_t n);

/// Every partition passing the exact lumpability check, canonical order
/// (fewer lumps first). Throws GuardExceededError when B_n > guard. With
/// threads > 1 each worker walks the stream and checks every k-th element.
std::vector<Partition> brute_force_lumpings(const StochasticMatrix& p, double lump_tol = kDefaultLumpTol,
                                            std::uint64_t guard = kDefaultGuard, std::size_t threads = 0);

}  // namespace lumpchain
