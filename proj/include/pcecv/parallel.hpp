#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "pcecv/errors.hpp"

namespace pcecv {

// Runs fn(0..n_tasks-1) across at most `threads` workers. Task order within
// a worker follows a shared atomic counter, so results must be written to
// task-indexed slots; with that discipline the output is independent of the
// thread count. The first exception thrown by any task is rethrown on the
// calling thread after all workers have drained.
inline void parallel_for(int n_tasks, int threads,
                         const std::function<void(int)>& fn) {
  if (n_tasks <= 0) return;
  if (threads < 1) throw ConfigError("parallel_for requires threads >= 1");
  const int workers = std::min(threads, n_tasks);
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pcecv
