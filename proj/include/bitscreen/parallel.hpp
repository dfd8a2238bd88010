#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace bitscreen {

// Global worker count. Defaults to hardware_concurrency, overridable by the
// BITSCREEN_THREADS environment variable and set_thread_count().
int thread_count();
void set_thread_count(int n);

// Fixed chunk grid over [begin, end). The grid depends only on the range and
// grain, never on the worker count, so any reduction that combines per-chunk
// results in grid order is bit-identical across thread settings.
std::vector<std::pair<std::int64_t, std::int64_t>> chunk_grid(std::int64_t begin,
                                                              std::int64_t end,
                                                              std::int64_t grain);

// Runs fn over every chunk of the grid. Chunks must write to disjoint state.
void parallel_for_chunks(std::int64_t begin, std::int64_t end, std::int64_t grain,
                         const std::function<void(std::int64_t, std::int64_t)>& fn);

// Runs fn(chunk_index, lo, hi) over the grid; callers store per-chunk results
// indexed by chunk_index and combine them serially in grid order.
void parallel_for_grid(const std::vector<std::pair<std::int64_t, std::int64_t>>& grid,
                       const std::function<void(std::size_t, std::int64_t, std::int64_t)>& fn);

}  // namespace bitscreen
