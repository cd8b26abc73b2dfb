#pragma once

#include <span>

namespace hmflow::par {

// Worker count used by all row-parallel kernels. Defaults to the OpenMP
// maximum, capped by the HMFLOW_THREADS environment variable.
int worker_count();
void set_worker_count(int n);

// Pairwise sum in index order. The grouping depends only on the input length,
// so results are bit-identical for any worker count.
double ordered_sum(std::span<const double> values);

}  // namespace hmflow::par
