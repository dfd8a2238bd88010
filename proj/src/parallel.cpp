#include "bitscreen/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace bitscreen {

namespace {

int default_threads() {
  if (const char* env = std::getenv("BITSCREEN_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::atomic<int> g_threads{0};  // 0 = uninitialized

}  // namespace

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n == 0) {
    n = default_threads();
    g_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : default_threads()); }

std::vector<std::pair<std::int64_t, std::int64_t>> chunk_grid(std::int64_t begin,
                                                              std::int64_t end,
                                                              std::int64_t grain) {
  std::vector<std::pair<std::int64_t, std::int64_t>> grid;
  if (end <= begin) return grid;
  if (grain < 1) grain = 1;
  grid.reserve(static_cast<std::size_t>((end - begin + grain - 1) / grain));
  for (std::int64_t lo = begin; lo < end; lo += grain)
    grid.emplace_back(lo, std::min(lo + grain, end));
  return grid;
}

void parallel_for_grid(const std::vector<std::pair<std::int64_t, std::int64_t>>& grid,
                       const std::function<void(std::size_t, std::int64_t, std::int64_t)>& fn) {
  const std::size_t nchunks = grid.size();
  if (nchunks == 0) return;
  const int workers = std::min<std::int64_t>(thread_count(), static_cast<std::int64_t>(nchunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) fn(c, grid[c].first, grid[c].second);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      fn(c, grid[c].first, grid[c].second);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

void parallel_for_chunks(std::int64_t begin, std::int64_t end, std::int64_t grain,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
  parallel_for_grid(chunk_grid(begin, end, grain),
                    [&fn](std::size_t, std::int64_t lo, std::int64_t hi) { fn(lo, hi); });
}

}  // namespace bitscreen
