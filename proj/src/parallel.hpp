#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace logtax::detail {

/// Runs fn(chunk, begin, end) over [0, n) split into at most `threads`
/// contiguous chunks. Chunk boundaries depend only on n and the chunk count.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  std::size_t chunks = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t begin = n * c / chunks;
    std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
  }
}

inline std::size_t chunk_count(std::size_t n, unsigned threads) {
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
}

}  // namespace logtax::detail
