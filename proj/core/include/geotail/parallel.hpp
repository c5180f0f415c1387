#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace geotail {

/// Runs fn(i) for i in [0, n) on up to n_threads threads with static
/// chunking. n_threads <= 0 means hardware concurrency. Each index must write
/// only its own output slot; results are then independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = n_threads <= 0 ? (hw ? hw : 1) : static_cast<std::size_t>(n_threads);
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace geotail
