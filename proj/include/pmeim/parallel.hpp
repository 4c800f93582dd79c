// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pmeim {

// Number of worker threads used by the parallel loops; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are disjoint and
// every index is visited exactly once, so results written per index do not depend
// on the thread count. The first exception thrown by a worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body &&body, std::size_t min_chunk = 1) {
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
  if (workers <= 1 || n <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pmeim
