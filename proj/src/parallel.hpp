#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ggdr::detail {

/// Thread count from GGDR_THREADS, else 1.
inline unsigned thread_hint() {
  if (const char* env = std::getenv("GGDR_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return 1;
}

/// Runs body(i) for i in [0, n). Each index is handled by exactly one
/// thread; callers only write to slots owned by i. An exception from the
/// lowest failing index is rethrown after all threads join.
template <typename Index, typename Body>
void parallel_for(Index n, Body&& body) {
  const unsigned threads =
      std::min<unsigned>(thread_hint(), static_cast<unsigned>(std::max<Index>(n, 1)));
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (Index i = t; i < n; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ggdr::detail
