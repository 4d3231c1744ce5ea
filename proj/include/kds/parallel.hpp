#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace kds {

// Worker-pool size for data-parallel loops. Resolution order: explicit
// set_thread_count (CLI --threads), KDS_THREADS env var, hardware.
inline int& thread_count_ref() {
  static int count = [] {
    if (const char* env = std::getenv("KDS_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }();
  return count;
}

inline void set_thread_count(int n) {
  if (n >= 1) thread_count_ref() = n;
}

inline int thread_count() { return thread_count_ref(); }

// Chunked parallel loop over [0, n). The body gets (begin, end, worker_id);
// results that need merging are the caller's business (worker-indexed slots
// keep reductions deterministic regardless of scheduling).
inline void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, int)>& body) {
  const int workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2) {
    body(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t b = std::min(n, static_cast<std::size_t>(w) * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&body, b, e, w] { body(b, e, w); });
  }
  for (auto& t : pool) t.join();
}

// Independent tasks (e.g. trials) distributed over the pool.
inline void parallel_tasks(std::size_t n, const std::function<void(std::size_t)>& task) {
  const int workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        task(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace kds
