#include "hmflow/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace hmflow::par {
namespace {

int initial_workers() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("HMFLOW_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (...) {
      // ignore malformed values
    }
  }
  return std::max(1, n);
}

int& workers() {
  static int n = initial_workers();
  return n;
}

double pairwise(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise(v, half) + pairwise(v + half, n - half);
}

}  // namespace

int worker_count() { return workers(); }

void set_worker_count(int n) { workers() = std::max(1, n); }

double ordered_sum(std::span<const double> values) {
  return pairwise(values.data(), values.size());
}

}  // namespace hmflow::par
