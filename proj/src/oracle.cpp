#include "lumpchain/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "parallel.hpp"

namespace lumpchain {

std::uint64_t bell_number(std::size_t n) {
  if (n == 0) return 1;
  // Row k of the Bell triangle starts with B_k and ends with B_{k+1}.
  std::vector<std::uint64_t> row{1};
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<std::uint64_t> next{row.back()};
    next.reserve(row.size() + 1);
    for (std::uint64_t v : row) {
      if (v > std::numeric_limits<std::uint64_t>::max() - next.back()) {
        throw Error(ErrorCode::Overflow, "Bell number B_" + std::to_string(n) + " exceeds 64-bit range");
      }
      next.push_back(next.back() + v);
    }
    row = std::move(next);
  }
  return row.back();
}

PartitionIterator::PartitionIterator(std::size_t n) : n_(n), cursor_(n, 0), prefix_max_(n, 0) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "partition enumeration needs n >= 1");
}

bool PartitionIterator::advance() {
  for (std::size_t i = n_; i-- > 1;) {
    if (cursor_[i] <= prefix_max_[i - 1]) {
      ++cursor_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], cursor_[i]);
      for (std::size_t j = i + 1; j < n_; ++j) {
        cursor_[j] = 0;
        prefix_max_[j] = prefix_max_[i];
      }
      return true;
    }
  }
  return false;
}

std::optional<Partition> PartitionIterator::next() {
  if (done_) return std::nullopt;
  if (started_ && !advance()) {
    done_ = true;
    return std::nullopt;
  }
  started_ = true;
  return Partition::from_labels(cursor_);
}

PartitionIterator enumerate_partitions(std::size_t n) { return PartitionIterator(n); }

std::vector<Partition> brute_force_lumpings(const StochasticMatrix& p, double lump_tol, std::uint64_t guard,
                                            std::size_t threads) {
  std::uint64_t count = 0;
  try {
    count = bell_number(p.n());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Overflow) throw;
    throw GuardExceededError(p.n(), std::numeric_limits<std::uint64_t>::max(), guard, true);
  }
  if (count > guard) throw GuardExceededError(p.n(), count, guard, false);

  const std::size_t workers = std::max<std::size_t>(threads, 1);
  std::vector<std::vector<Partition>> found(workers);
  detail::parallel_for(workers, workers, [&](std::size_t w) {
    PartitionIterator it(p.n());
    std::size_t index = 0;
    while (auto part = it.next()) {
      if (index++ % workers != w) continue;
      if (is_lumpable(p, *part, lump_tol).lumpable) found[w].push_back(std::move(*part));
    }
  });
  std::vector<Partition> out;
  for (auto& f : found) out.insert(out.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  std::sort(out.begin(), out.end(), lump_count_order);
  return out;
}

}  // namespace lumpchain
