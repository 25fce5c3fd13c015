#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace wct {

inline int thread_count() {
  if (const char* env = std::getenv("WCTSCHED_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(chunk) for chunk = 0..chunks-1 on a pool of workers. Chunk
// boundaries never depend on the thread count, so results stay deterministic
// as long as chunks write disjoint state.
inline void parallel_for_chunks(int chunks, const std::function<void(int)>& fn) {
  int workers = std::min(thread_count(), chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) fn(c);
    });
  for (auto& t : pool) t.join();
}

// Summation with a fixed association order, independent of how the values
// were produced.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace wct
