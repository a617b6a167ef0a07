#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dirmax {

// Process-wide worker count used by the parallel loops below; 1 runs inline.
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries depend
// only on n and the worker count, and callers reduce per-chunk results in chunk
// order, so results do not depend on scheduling.
template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, thread_count())), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = std::min(n, w * step);
    const std::size_t e = std::min(n, b + step);
    pool.emplace_back([&, w, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace dirmax
