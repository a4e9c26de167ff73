#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace glspec {

// Blocked parallel loop over [0, count). threads == 0 picks the hardware
// count. Work must write disjoint outputs; block boundaries are deterministic
// so results do not depend on the thread count.
template <typename Body>
void parallel_for(std::size_t count, int threads, const Body& body) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t want = threads > 0 ? static_cast<std::size_t>(threads) : (hw ? hw : 1);
  if (want <= 1 || count < 2 * want) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(want);
  const std::size_t chunk = (count + want - 1) / want;
  for (std::size_t t = 0; t < want; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = begin + chunk < count ? begin + chunk : count;
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace glspec
