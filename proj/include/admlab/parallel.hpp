#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace admlab {

/// Calls f(i) for i in [0, n) on up to `threads` worker threads (0 picks the
/// hardware concurrency). f must not touch shared mutable state.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Results of f(i) for i in [0, n), computed with parallel_for.
template <class F>
auto parallel_map(std::size_t n, F&& f, unsigned threads = 0) {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); }, threads);
  return out;
}

}  // namespace admlab
