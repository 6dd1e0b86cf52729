#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lcbl {

/// Worker count: hardware concurrency, overridable with LCBL_THREADS.
unsigned worker_count();

/// Runs body(begin, end) over fixed chunks of [0, count). Chunk boundaries
/// depend only on count and chunk, so per-chunk results are reproducible
/// regardless of the number of workers.
void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// Evaluates row(i) for every i and returns the values in index order.
std::vector<double> parallel_map(std::size_t count, const std::function<double(std::size_t)>& row,
                                 std::size_t chunk = 64);

/// Recursive pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace lcbl
