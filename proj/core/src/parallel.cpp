#include "hmvp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hmvp {

namespace {
int g_threads = 0;  // 0 = unresolved

int resolve_threads() {
  if (g_threads > 0) return g_threads;
  if (const char* env = std::getenv("HMVP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}
}  // namespace

void set_thread_count(int count) { g_threads = count; }
int thread_count() { return resolve_threads(); }

std::size_t chunk_count(std::size_t size) {
  if (size < 1024) return 1;
  return std::min<std::size_t>(64, size);
}

void parallel_chunks(std::size_t size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(size);
  const int workers = std::min<int>(resolve_threads(), static_cast<int>(chunks));
  auto chunk_bounds = [&](std::size_t c) {
    const std::size_t lo = size * c / chunks;
    const std::size_t hi = size * (c + 1) / chunks;
    return std::pair{lo, hi};
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [lo, hi] = chunk_bounds(c);
      fn(lo, hi, c);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) break;
      auto [lo, hi] = chunk_bounds(c);
      fn(lo, hi, c);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

}  // namespace hmvp
