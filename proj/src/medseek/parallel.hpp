#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace medseek {

// Runs fn(i) for i in [0, n) on at most `max_in_flight` threads. The first
// exception thrown by any task is rethrown after all workers finish.
inline void parallel_for(size_t n, size_t max_in_flight, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  auto workers = std::clamp<size_t>(max_in_flight, 1, n);
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::atomic_flag error_set = ATOMIC_FLAG_INIT;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!error_set.test_and_set()) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace medseek
