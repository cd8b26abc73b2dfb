#include "hmflow/map_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "hmflow/errors.hpp"
#include "hmflow/parallel.hpp"

namespace hmflow {

namespace {

// Partition of unity in s = log|z|: 1 for s <= -a, 0 for s >= a, and
// erfc(c s / a) / 2 in between, so that weight(z) + weight(1/z) = 1. The
// transition uses the whole band the stencils can see; c balances the
// truncation jump erfc(c) against the trapezoid-rule error of the ramp,
// exp(-(pi a / h)^2 / c^2), at c^2 = pi a / h.
struct Partition {
  double a;
  double c;
};

double partition_weight(double r, const Partition& p) {
  if (r == 0.0) return 1.0;
  const double s = std::log(r);
  if (s <= -p.a) return 1.0;
  if (s >= p.a) return 0.0;
  return 0.5 * std::erfc(p.c * s / p.a);
}

// Lagrange weights on the kSyncPoints nodes floor(x) - 2 ... floor(x) + 3 at
// fractional offset t in [0, 1).
std::array<double, kSyncPoints> lagrange_weights(double t) {
  std::array<double, kSyncPoints> w{};
  constexpr int first = -(kSyncPoints / 2 - 1);
  for (int m = 0; m < kSyncPoints; ++m) {
    double v = 1.0;
    for (int l = 0; l < kSyncPoints; ++l) {
      if (l != m) v *= (t - (first + l)) / static_cast<double>(m - l);
    }
    w[m] = v;
  }
  return w;
}

std::shared_ptr<GridGeometry> build_geometry(int n, double L) {
  if (n < 65 || n % 2 == 0) throw Error(ErrorKind::InvalidArgument, "grid size N must be odd and >= 65");
  auto g = std::make_shared<GridGeometry>();
  g->n = n;
  g->half_width = L;
  g->h = 2.0 * L / (n - 1);
  const double h = g->h;
  if (!(L > 1.0) || L > 2.0) throw Error(ErrorKind::InvalidArgument, "chart half-width must satisfy 1 < L <= 2");
  const double active_radius = 1.0 + kActiveMargin * h;
  const double edge = L - (kStencilReach + 0.5) * h;
  if (!(edge > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "grid too coarse: the overlap band holds no stencil-valid nodes");
  }
  Partition part;
  part.a = std::log(edge);
  part.c = std::min(6.0, std::sqrt(std::numbers::pi * part.a / h));

  const std::size_t count = static_cast<std::size_t>(n) * n;
  g->coord.resize(count);
  g->sigma.resize(count);
  g->weight.resize(count);
  g->interior.assign(count, 0);
  g->active.assign(count, 0);
  g->north_points.resize(count);
  g->south_points.resize(count);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int k = g->index(i, j);
      const Complex z(-L + i * h, -L + j * h);
      g->coord[k] = z;
      g->sigma[k] = conformal_factor(z);
      g->weight[k] = partition_weight(std::abs(z), part);
      g->north_points[k] = stereo_to_sphere(z, ChartId::North);
      g->south_points[k] = stereo_to_sphere(z, ChartId::South);
      const int r = kStencilReach;
      const bool inside = i >= r && j >= r && i < n - r && j < n - r;
      g->interior[k] = inside ? 1 : 0;
      g->active[k] = (inside && std::abs(z) <= active_radius) ? 1 : 0;
    }
  }
  for (int k = 0; k < static_cast<int>(count); ++k) {
    if (g->active[k]) continue;
    const Complex w = 1.0 / g->coord[k];
    const double fx = (w.real() + L) / h;
    const double fy = (w.imag() + L) / h;
    SyncStencil st;
    st.node = k;
    constexpr int back = kSyncPoints / 2 - 1;
    st.i0 = static_cast<int>(std::floor(fx)) - back;
    st.j0 = static_cast<int>(std::floor(fy)) - back;
    st.wx = lagrange_weights(fx - std::floor(fx));
    st.wy = lagrange_weights(fy - std::floor(fy));
    // Idempotent sync needs every source node to be one the flow advances.
    for (int b = 0; b < kSyncPoints; ++b) {
      for (int a = 0; a < kSyncPoints; ++a) {
        const int i = st.i0 + a;
        const int j = st.j0 + b;
        if (i < 0 || j < 0 || i >= n || j >= n || !g->active[g->index(i, j)]) {
          throw Error(ErrorKind::InvalidArgument, "grid too coarse: sync stencil leaves the active band");
        }
      }
    }
    g->sync.push_back(st);
  }
  return g;
}

}  // namespace

double GridGeometry::sigma_min() const { return 2.0 / (1.0 + 2.0 * half_width * half_width); }

std::shared_ptr<const GridGeometry> grid_geometry(int n, double half_width) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::shared_ptr<const GridGeometry>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, half_width);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto g = build_geometry(n, half_width);
  cache.emplace(key, g);
  return g;
}

MapField::MapField(int n, double half_width) : geom_(grid_geometry(n, half_width)) {
  const std::size_t count = static_cast<std::size_t>(n) * n;
  north_ = ChartGrid{ChartId::North, std::vector<SpherePoint>(count, SpherePoint(0, 0, 1))};
  south_ = ChartGrid{ChartId::South, std::vector<SpherePoint>(count, SpherePoint(0, 0, 1))};
}

double MapField::max_norm_defect() const {
  double m = 0.0;
  for (const auto* g : {&north_, &south_}) {
    for (const auto& v : g->values) m = std::max(m, std::abs(v.norm() - 1.0));
  }
  return m;
}

MapField sample_field(const MapSource& source, int n, double half_width) {
  MapField field(n, half_width);
  const auto& geom = field.geometry();
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    auto& vals = field.grid(chart).values;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int k = geom.index(i, j);
        vals[k] = source(chart, geom.coord[k]).normalized();
      }
    }
  }
  return field;
}

SpherePoint interpolate_chart(const MapField& field, ChartId chart, Complex coord) {
  const auto& g = field.geometry();
  const double fx = (coord.real() + g.half_width) / g.h;
  const double fy = (coord.imag() + g.half_width) / g.h;
  int i = static_cast<int>(std::floor(fx));
  int j = static_cast<int>(std::floor(fy));
  if (i < 0 || j < 0 || i > g.n - 1 || j > g.n - 1 || fx > g.n - 1 || fy > g.n - 1) {
    throw Error(ErrorKind::RangeError, "interpolation point outside the chart grid");
  }
  i = std::min(i, g.n - 2);
  j = std::min(j, g.n - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  const auto& v = field.grid(chart).values;
  SpherePoint p = (1 - tx) * (1 - ty) * v[g.index(i, j)] + tx * (1 - ty) * v[g.index(i + 1, j)] +
                  (1 - tx) * ty * v[g.index(i, j + 1)] + tx * ty * v[g.index(i + 1, j + 1)];
  return p.normalized();
}

SpherePoint interpolate(const MapField& field, const SpherePoint& p) {
  const ChartId chart = owning_chart(p);
  return interpolate_chart(field, chart, sphere_to_stereo(p.normalized(), chart));
}

void sync_overlap_inplace(MapField& field) {
  const auto& g = field.geometry();
  const auto& stencils = g.sync;
  const int count = static_cast<int>(stencils.size());
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    const auto& src = field.grid(other(chart)).values;
    auto& dst = field.grid(chart).values;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int s = 0; s < count; ++s) {
      const auto& st = stencils[s];
      Vec3 acc = Vec3::Zero();
      for (int b = 0; b < kSyncPoints; ++b) {
        Vec3 row = Vec3::Zero();
        const int base = g.index(st.i0, st.j0 + b);
        for (int a = 0; a < kSyncPoints; ++a) row += st.wx[a] * src[base + a];
        acc += st.wy[b] * row;
      }
      dst[st.node] = acc.normalized();
    }
  }
}

MapField sync_overlap(const MapField& field) {
  MapField out = field;
  sync_overlap_inplace(out);
  return out;
}

MapField refine(const MapField& field) {
  const int n = field.n();
  const int m = 2 * n - 1;
  MapField out(m, field.half_width());
  const auto& gc = field.geometry();
  const auto& gf = out.geometry();
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    const auto& src = field.grid(chart).values;
    auto& dst = out.grid(chart).values;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int J = 0; J < m; ++J) {
      for (int I = 0; I < m; ++I) {
        const int i = I / 2, j = J / 2;
        const bool ox = I % 2 == 1, oy = J % 2 == 1;
        Vec3 v = src[gc.index(i, j)];
        if (ox && oy) {
          v = 0.25 * (src[gc.index(i, j)] + src[gc.index(i + 1, j)] + src[gc.index(i, j + 1)] +
                      src[gc.index(i + 1, j + 1)]);
        } else if (ox) {
          v = 0.5 * (src[gc.index(i, j)] + src[gc.index(i + 1, j)]);
        } else if (oy) {
          v = 0.5 * (src[gc.index(i, j)] + src[gc.index(i, j + 1)]);
        }
        dst[gf.index(I, J)] = (ox || oy) ? Vec3(v.normalized()) : v;
      }
    }
  }
  return out;
}

namespace {

// Quadratic polynomial vector field A(x) with seeded normal coefficients.
struct PolyField {
  std::array<Vec3, 10> c;

  Vec3 operator()(const Vec3& x) const {
    const std::array<double, 10> m = {1.0,         x.x(),       x.y(),       x.z(),       x.x() * x.x(),
                                      x.y() * x.y(), x.z() * x.z(), x.x() * x.y(), x.y() * x.z(), x.z() * x.x()};
    Vec3 v = Vec3::Zero();
    for (int k = 0; k < 10; ++k) v += m[k] * c[k];
    return v;
  }
};

PolyField make_poly_field(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PolyField f;
  for (auto& v : f.c) v = Vec3(normal(rng), normal(rng), normal(rng));
  // Scale to unit sup-norm over a fixed Fibonacci point set so the amplitude
  // means the same thing for every grid.
  double sup = 0.0;
  const int samples = 4096;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < samples; ++k) {
    const double zc = 1.0 - 2.0 * (k + 0.5) / samples;
    const double rc = std::sqrt(1.0 - zc * zc);
    const Vec3 x(rc * std::cos(golden * k), rc * std::sin(golden * k), zc);
    sup = std::max(sup, f(x).norm());
  }
  for (auto& v : f.c) v /= sup;
  return f;
}

}  // namespace

TangentField random_tangent_field(const MapField& field, std::uint64_t seed) {
  const PolyField f = make_poly_field(seed);
  const auto& g = field.geometry();
  TangentField t;
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    const auto& u = field.grid(chart).values;
    const auto& pts = g.points(chart);
    auto& out = chart == ChartId::North ? t.north : t.south;
    out.resize(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const Vec3 a = f(pts[k]);
      out[k] = a - a.dot(u[k]) * u[k];
    }
  }
  return t;
}

MapField displace(const MapField& field, const TangentField& v, double s) {
  MapField out = field;
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    auto& u = out.grid(chart).values;
    const auto& dv = v.chart(chart);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = (u[k] + s * dv[k]).normalized();
  }
  return out;
}

MapField perturb(const MapField& field, double amplitude, std::uint64_t seed) {
  return displace(field, random_tangent_field(field, seed), amplitude);
}

}  // namespace hmflow
