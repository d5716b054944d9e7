#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dualot::detail {

// Splits [0, n) into `workers` contiguous blocks and runs fn(begin, end, w)
// on each, w being the block index. Blocks depend only on (n, workers), so a
// caller that reduces per-block results in block order is deterministic.
template <class Fn>
void for_blocks(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) {
    const std::size_t b = std::min(n, w * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&fn, b, e, w] { fn(b, e, w); });
  }
  fn(std::size_t{0}, std::min(n, chunk), 0u);
}

inline unsigned block_count(std::size_t n, unsigned workers) {
  return std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
}

}  // namespace dualot::detail
