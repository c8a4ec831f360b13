#pragma once
// Chunked parallel-for over an index range.  Work items must be independent;
// callers own any reduction.  Thread count comes from worker_count().

#include <cstddef>
#include <thread>
#include <vector>

#include "rtv/util.hpp"

namespace rtv {

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  int workers = worker_count();
  if (workers <= 1 || count < 2048) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t chunk = (count + workers - 1) / static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = chunk * static_cast<std::size_t>(w);
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rtv
