#include "advrisk/parallel.hpp"

#include <atomic>

namespace advrisk::parallel {

namespace {
std::atomic<unsigned> g_max_threads{1};
}

void set_max_threads(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  g_max_threads.store(n, std::memory_order_relaxed);
}

unsigned max_threads() { return g_max_threads.load(std::memory_order_relaxed); }

}  // namespace advrisk::parallel
