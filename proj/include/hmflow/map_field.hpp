#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "hmflow/analytic_maps.hpp"
#include "hmflow/sphere_geometry.hpp"

namespace hmflow {

// Half-width of the finite-difference stencils, in nodes.
inline constexpr int kStencilReach = 3;
// Points per axis of the partner-chart interpolation used by sync.
inline constexpr int kSyncPoints = 6;
// Nodes with |z| <= 1 + kActiveMargin * h are advanced by the flow; the rest
// are filled from the partner chart.
inline constexpr double kActiveMargin = 2.5;

/// Partner-chart interpolation stencil for one overwritten node: a 6x6 block
/// of the other chart starting at (i0, j0) with tensor Lagrange weights.
struct SyncStencil {
  int node = 0;
  int i0 = 0;
  int j0 = 0;
  std::array<double, kSyncPoints> wx{};
  std::array<double, kSyncPoints> wy{};
};

/// Per-node data shared by both charts of every field with the same (N, L).
/// The two charts are mirror images under w = 1/z, so one table serves both.
struct GridGeometry {
  int n = 0;
  double half_width = 0.0;
  double h = 0.0;

  std::vector<Complex> coord;
  std::vector<double> sigma;
  // Smooth partition of unity: weight(z) + weight(1/z) = 1 on the overlap.
  std::vector<double> weight;
  // Nodes whose stencil (kStencilReach in each axis direction) lies inside
  // the grid.
  std::vector<std::uint8_t> interior;
  // Interior nodes with |z| <= 1 + kActiveMargin h, the ones advanced by the
  // flow.
  std::vector<std::uint8_t> active;
  std::vector<SpherePoint> north_points;
  std::vector<SpherePoint> south_points;
  // Every inactive node, filled from the partner chart by sync.
  std::vector<SyncStencil> sync;

  int index(int i, int j) const { return i + n * j; }
  const std::vector<SpherePoint>& points(ChartId chart) const {
    return chart == ChartId::North ? north_points : south_points;
  }
  double sigma_min() const;  // conformal factor at the chart corners
};

/// Cached, immutable geometry for (n, half_width). Throws InvalidArgument for
/// even n, n < 65, or a half-width too small to hold the overlap band.
std::shared_ptr<const GridGeometry> grid_geometry(int n, double half_width);

/// One chart's N x N samples; node (i, j) has coordinate
/// (-L + i h) + i(-L + j h) and is stored at index i + N j.
struct ChartGrid {
  ChartId chart = ChartId::North;
  std::vector<SpherePoint> values;
};

class MapField {
 public:
  /// Constant field equal to the north pole.
  MapField(int n, double half_width = 1.2);

  int n() const { return geom_->n; }
  double half_width() const { return geom_->half_width; }
  double spacing() const { return geom_->h; }
  const GridGeometry& geometry() const { return *geom_; }
  std::shared_ptr<const GridGeometry> geometry_ptr() const { return geom_; }

  ChartGrid& grid(ChartId chart) { return chart == ChartId::North ? north_ : south_; }
  const ChartGrid& grid(ChartId chart) const { return chart == ChartId::North ? north_ : south_; }

  SpherePoint& at(ChartId chart, int i, int j) { return grid(chart).values[geom_->index(i, j)]; }
  const SpherePoint& at(ChartId chart, int i, int j) const { return grid(chart).values[geom_->index(i, j)]; }

  /// Largest | |u| - 1 | over both charts.
  double max_norm_defect() const;

 private:
  std::shared_ptr<const GridGeometry> geom_;
  ChartGrid north_;
  ChartGrid south_;
};

/// Fills every node of both charts by exact evaluation.
MapField sample_field(const MapSource& source, int n, double half_width = 1.2);

/// Bilinear interpolation in the chart owning p, renormalized.
SpherePoint interpolate(const MapField& field, const SpherePoint& p);

/// Bilinear interpolation at a coordinate of a given chart; the coordinate
/// must lie inside the grid.
SpherePoint interpolate_chart(const MapField& field, ChartId chart, Complex coord);

/// Overwrites every inactive node (|z| > 1 + 2.5h) of each chart with a
/// degree-5 tensor interpolation of the partner chart, then renormalizes.
/// The source nodes of every stencil are active, so the operation is exactly
/// idempotent.
void sync_overlap_inplace(MapField& field);
MapField sync_overlap(const MapField& field);

/// N -> 2N - 1: injection at even indices, bilinear midpoints, renormalized.
MapField refine(const MapField& field);

/// Pushes u toward a deterministic smooth tangent field v(x) built from
/// seeded random quadratic polynomials in the domain point x, scaled to
/// sup-norm 1 over the nodes: u <- normalize(u + amplitude * P_u v).
MapField perturb(const MapField& field, double amplitude, std::uint64_t seed);

/// The same tangent field as `perturb`, evaluated per node (raw ambient values
/// projected onto the tangent plane of u).
struct TangentField {
  std::vector<Vec3> north;
  std::vector<Vec3> south;
  const std::vector<Vec3>& chart(ChartId c) const { return c == ChartId::North ? north : south; }
};
TangentField random_tangent_field(const MapField& field, std::uint64_t seed);

/// u <- normalize(u + s v) at every node.
MapField displace(const MapField& field, const TangentField& v, double s);

}  // namespace hmflow
