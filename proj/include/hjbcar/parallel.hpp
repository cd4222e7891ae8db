#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace hjbcar {

/// Runs `body(begin_chunk, end_chunk)` over a partition of [begin, end).
/// threads <= 0 means hardware concurrency. The body must not throw; workers
/// write disjoint data, so results do not depend on the partition.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int, int)>& body) {
  const int n = end - begin;
  if (n <= 0) return;
  int workers = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  workers = std::clamp(workers, 1, n);
  if (workers == 1) {
    body(begin, end);
    return;
  }
  const int chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  int lo = begin;
  for (int w = 0; w + 1 < workers && lo + chunk < end; ++w) {
    pool.emplace_back(body, lo, lo + chunk);
    lo += chunk;
  }
  body(lo, end);
  for (auto& t : pool) t.join();
}

}  // namespace hjbcar
