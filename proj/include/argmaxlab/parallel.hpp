#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace argmaxlab {

// Runs fn(i) for i in [0, count).  Work is split into contiguous index
// blocks; fn must write only to its own slot so the result is independent
// of thread scheduling.
template <class Fn>
void parallel_for(long long count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  const long long chunk = (count + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const long long lo = t * chunk;
    const long long hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace argmaxlab
