#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace psb {

/// Worker count: explicit request wins, then PSB_THREADS, then hardware.
inline int resolve_threads(int requested = 0) {
  auto clamp = [](long v) { return static_cast<int>(v < 1 ? 1 : (v > 256 ? 256 : v)); };
  if (requested > 0) return clamp(requested);
  if (const char* env = std::getenv("PSB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return clamp(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? clamp(static_cast<long>(hc > 64 ? 64 : hc)) : 1;
}

/// Runs block(0..nblocks-1) across threads, then folds the results in block
/// order. The decomposition and fold order depend only on nblocks, so the
/// outcome is bit-identical for every thread count. Exceptions thrown inside
/// a block are rethrown on the calling thread.
template <class T, class BlockFn, class MergeFn>
T parallel_blocks(uint64_t nblocks, T init, BlockFn&& block, MergeFn&& merge,
                  int threads = 0) {
  if (nblocks == 0) return init;
  std::vector<T> results(static_cast<size_t>(nblocks));
  const int nt = resolve_threads(threads);
  if (nt <= 1 || nblocks == 1) {
    for (uint64_t b = 0; b < nblocks; ++b)
      results[static_cast<size_t>(b)] = block(b);
  } else {
    std::atomic<uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
      for (;;) {
        uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= nblocks) return;
        try {
          results[static_cast<size_t>(b)] = block(b);
        } catch (...) {
          std::lock_guard<std::mutex> lk(error_mu);
          if (!first_error) first_error = std::current_exception();
          next.store(nblocks, std::memory_order_relaxed);
          return;
        }
      }
    };
    const uint64_t spawn = nblocks < uint64_t(nt) ? nblocks : uint64_t(nt);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(spawn));
    for (uint64_t i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  T acc = std::move(init);
  for (uint64_t b = 0; b < nblocks; ++b)
    acc = merge(std::move(acc), std::move(results[static_cast<size_t>(b)]));
  return acc;
}

}  // namespace psb
