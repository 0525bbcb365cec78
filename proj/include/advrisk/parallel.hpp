#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

// Chunked parallel loops over point indices. Work items write disjoint output
// slots, so results never depend on the thread count.
namespace advrisk::parallel {

void set_max_threads(unsigned n);
unsigned max_threads();

// Calls fn(begin, end) on contiguous chunks of [0, n). Runs inline when the
// range is smaller than 2 * min_chunk or only one thread is allowed.
template <class Fn>
void for_chunks(std::size_t n, std::size_t min_chunk, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(max_threads(), min_chunk == 0 ? 1 : n / min_chunk);
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace advrisk::parallel
