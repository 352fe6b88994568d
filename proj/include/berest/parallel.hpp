#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace berest {

/// Worker count: BEREST_WORKERS env var if set, otherwise hardware threads.
inline int default_worker_count() {
  if (const char* env = std::getenv("BEREST_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(i) for i in [0, count) on up to `workers` threads. Tasks must not
/// share mutable state; results written by index stay order-independent.
/// The first exception thrown by any task is rethrown after all finish.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const int nthreads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace berest
