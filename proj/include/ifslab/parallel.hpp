#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ifslab {

/// Execution settings. Results never depend on `threads`.
struct Execution {
  unsigned threads = 1;
};

/// Runs fn(i) for i in [0, n). Each index writes only its own slot, so the
/// outcome is independent of scheduling. If several calls throw, the
/// exception from the smallest index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Execution exec, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(exec.threads, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < failed_at) {
              failed_at = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ifslab
