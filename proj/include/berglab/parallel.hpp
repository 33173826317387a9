#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace berglab {

/// Worker count: BERGLAB_THREADS overrides hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("BERGLAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Deterministic block map-reduce over the index range [0, total).
///
/// The range is split into fixed-size blocks; each block is mapped
/// independently (any thread), then the per-block results are combined
/// serially in block order. Output is therefore bitwise identical for
/// every thread count.
///
/// Acc   must be default-constructible.
/// map   (block_begin, block_end, Acc&) accumulates one block.
/// fold  (Acc& total, const Acc& block) combines in ascending block order.
template <typename Acc, typename MapFn, typename FoldFn>
Acc parallel_block_reduce(std::size_t total, std::size_t block_size,
                          MapFn&& map, FoldFn&& fold) {
  if (block_size == 0) block_size = 1;
  const std::size_t nblocks = (total + block_size - 1) / block_size;
  std::vector<Acc> partial(nblocks);

  unsigned nthreads = thread_count();
  if (nthreads > 1 && nblocks > 1) {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t b = next.fetch_add(1);
        if (b >= nblocks) break;
        std::size_t lo = b * block_size;
        std::size_t hi = std::min(total, lo + block_size);
        map(lo, hi, partial[b]);
      }
    };
    unsigned spawn = std::min<std::size_t>(nthreads, nblocks);
    pool.reserve(spawn);
    for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) {
      std::size_t lo = b * block_size;
      std::size_t hi = std::min(total, lo + block_size);
      map(lo, hi, partial[b]);
    }
  }

  Acc out{};
  for (std::size_t b = 0; b < nblocks; ++b) fold(out, partial[b]);
  return out;
}

}  // namespace berglab
