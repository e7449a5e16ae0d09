#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gmconv {

/// Number of worker threads to use when the caller passes 0.
inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(k) for k in [0, n) over `threads` contiguous chunks. Each index
/// is visited exactly once; results are deterministic as long as body(k)
/// writes only to slots owned by k. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = n * t / threads;
    const std::size_t hi = n * (t + 1) / threads;
    pool.emplace_back([&, t, lo, hi] {
      try {
        for (std::size_t k = lo; k < hi; ++k) body(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gmconv
