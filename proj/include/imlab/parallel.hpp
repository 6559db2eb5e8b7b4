#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace imlab {

/// Worker count from IMLAB_WORKERS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("IMLAB_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Tasks are
/// pulled in index order; results must be written by index so the outcome does
/// not depend on scheduling. The first exception (lowest index) is rethrown.
inline void parallel_for(int n, const std::function<void(int)>& body, int workers = 0) {
  if (n <= 0) return;
  if (workers <= 0) workers = worker_count();
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex lock;
  int failed_at = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace imlab
