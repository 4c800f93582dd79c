// SPDX-License-Identifier: Apache-2.0

#include "pmeim/parallel.hpp"

#include <atomic>

namespace pmeim {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace pmeim
