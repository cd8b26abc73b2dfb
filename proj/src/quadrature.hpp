#pragma once

#include <array>
#include <vector>

#include "hmflow/map_field.hpp"
#include "hmflow/parallel.hpp"

namespace hmflow::detail {

inline constexpr std::array<ChartId, 2> kCharts = {ChartId::North, ChartId::South};

inline int ci(ChartId c) { return c == ChartId::North ? 0 : 1; }

// Sum over both charts of f(chart, k) * weight(k) over nodes with nonzero
// weight, accumulated per row and reduced in index order.
template <typename F>
double weighted_sum(const GridGeometry& g, F&& f) {
  const int n = g.n;
  std::vector<double> rows(2 * static_cast<std::size_t>(n), 0.0);
  for (ChartId chart : kCharts) {
    const int off = ci(chart) * n;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const int k = g.index(i, j);
        const double w = g.weight[k];
        if (w == 0.0) continue;
        s += w * f(chart, k);
      }
      rows[off + j] = s;
    }
  }
  return par::ordered_sum(rows);
}

}  // namespace hmflow::detail
