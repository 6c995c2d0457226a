#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nopeplus {

/// Worker cap: min(hardware, NOPEPLUS_THREADS). At least 1.
inline int max_threads() {
  static const int cached = [] {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("NOPEPLUS_THREADS")) {
      int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
    return n;
  }();
  return cached;
}

/// Runs fn(i) for i in [0, n) on contiguous static chunks. Each index owns
/// its own output slot; determinism is preserved by keeping any cross-index
/// reduction in the caller, in index order.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const size_t threads = std::min<size_t>(max_threads(), n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const size_t chunk = (n + threads - 1) / threads;
  for (size_t t = 0; t < threads; ++t) {
    const size_t lo = t * chunk;
    const size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nopeplus
