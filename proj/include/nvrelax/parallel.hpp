#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nvrelax {

// Worker count resolution: explicit request > NV_RELAXO_WORKERS > hardware.
int resolve_worker_count(int requested);

// Runs fn(i) for i in [0, n). Work units must be independent and write only
// to their own index; under that contract the result is identical for any
// worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Fixed-shape pairwise tree reduction with Neumaier-compensated leaves.
// The summation order depends only on the length, never on worker count,
// so ensemble averages are bit-stable.
double pairwise_sum(std::span<const double> values);

// Neumaier-compensated sequential sum; used for short accumulations.
double compensated_sum(std::span<const double> values);

}  // namespace nvrelax
