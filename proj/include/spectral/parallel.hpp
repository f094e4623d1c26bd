#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace spectral {

/// Worker count: hardware concurrency, capped by SPECTRAL_SERIES_THREADS.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPECTRAL_SERIES_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

/// Runs body(i) for i in [0, count) over contiguous blocks. Each index is
/// visited exactly once, so any body that writes only to slot i produces
/// output identical to the sequential loop.
template <typename Body>
void parallel_for(Eigen::Index count, Body&& body, Eigen::Index min_block = 64) {
  const unsigned workers = worker_count();
  if (workers <= 1 || count < 2 * min_block) {
    for (Eigen::Index i = 0; i < count; ++i) body(i);
    return;
  }
  const Eigen::Index chunks = std::min<Eigen::Index>(workers, count / min_block);
  const Eigen::Index step = (count + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index lo = c * step;
    const Eigen::Index hi = std::min(count, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (Eigen::Index i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace spectral
