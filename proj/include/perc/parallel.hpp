#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace perc {

// Runs fn(i) for i in [0, count) across up to `threads` workers. Callers
// write into index-addressed slots and aggregate afterwards in index order,
// so results do not depend on the worker count.
template <class F>
void parallel_for(std::int64_t count, int threads, F&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::int64_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace perc
