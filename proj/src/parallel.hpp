#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace pam::detail {

inline int worker_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// out[i] = f(i) for i in [0, count), strided over worker threads. Each sample
// owns its RNG stream, so the result does not depend on the worker count.
template <class F>
void parallel_fill(long count, int threads, std::vector<double>& out, F f) {
  out.assign(count, 0.0);
  const int workers = static_cast<int>(std::min<long>(worker_count(threads), std::max(1L, count)));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) out[i] = f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < count; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pam::detail
