#include "hmflow/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmflow/errors.hpp"
#include "hmflow/parallel.hpp"
#include "quadrature.hpp"
#include "stencils.hpp"

namespace hmflow {

using detail::ci;
using detail::kCharts;
using detail::weighted_sum;

const std::vector<double>& DensityField::of(EnergyKind kind, ChartId chart) const {
  switch (kind) {
    case EnergyKind::Holomorphic:
      return e_d[ci(chart)];
    case EnergyKind::Antiholomorphic:
      return e_db[ci(chart)];
    case EnergyKind::Total:
      break;
  }
  return e[ci(chart)];
}

DensityField energy_density(const MapField& field) {
  const auto& g = field.geometry();
  const int n = g.n;
  const double h = g.h;
  DensityField d;
  d.geometry = field.geometry_ptr();
  for (ChartId chart : kCharts) {
    const int c = ci(chart);
    const std::size_t count = static_cast<std::size_t>(n) * n;
    d.e[c].assign(count, 0.0);
    d.e_d[c].assign(count, 0.0);
    d.e_db[c].assign(count, 0.0);
    d.pullback[c].assign(count, 0.0);
    const auto& u = field.grid(chart).values;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int j = kStencilReach; j < n - kStencilReach; ++j) {
      for (int i = kStencilReach; i < n - kStencilReach; ++i) {
        const int k = g.index(i, j);
        Vec3 ux, uy;
        detail::gradient(u, k, n, h, ux, uy);
        const Vec3 cross = u[k].cross(uy);
        const double s2 = 4.0 * g.sigma[k] * g.sigma[k];
        const double ed = (ux - cross).squaredNorm() / s2;
        const double edb = (ux + cross).squaredNorm() / s2;
        d.e_d[c][k] = ed;
        d.e_db[c][k] = edb;
        d.e[c][k] = ed + edb;
        d.pullback[c][k] = u[k].dot(ux.cross(uy));
      }
    }
  }
  return d;
}

double region_energy(const DensityField& dens, const Region& region, EnergyKind kind) {
  const auto& g = *dens.geometry;
  const double h2 = g.h * g.h;
  const bool whole = region.kind == Region::Kind::WholeSphere;
  return weighted_sum(g, [&](ChartId chart, int k) {
    if (!whole && !region_contains(region, g.points(chart)[k])) return 0.0;
    return dens.of(kind, chart)[k] * g.sigma[k] * g.sigma[k] * h2;
  });
}

double region_pullback_degree(const DensityField& dens, const Region& region) {
  const auto& g = *dens.geometry;
  const double h2 = g.h * g.h;
  const bool whole = region.kind == Region::Kind::WholeSphere;
  const double total = weighted_sum(g, [&](ChartId chart, int k) {
    if (!whole && !region_contains(region, g.points(chart)[k])) return 0.0;
    return dens.pullback[ci(chart)][k] * h2;
  });
  return total / (4.0 * std::numbers::pi);
}

EnergyReport energy_report(const DensityField& dens, const Region& region) {
  EnergyReport r;
  r.region = region;
  r.E_d = region_energy(dens, region, EnergyKind::Holomorphic);
  r.E_db = region_energy(dens, region, EnergyKind::Antiholomorphic);
  r.E = r.E_d + r.E_db;
  r.kappa = r.E_d - r.E_db;
  r.degree_energy = r.kappa / (4.0 * std::numbers::pi);
  r.degree_pullback = region_pullback_degree(dens, region);
  return r;
}

EnergyReport energy_report(const MapField& field, const Region& region) {
  return energy_report(energy_density(field), region);
}

double degree_from_pullback(const MapField& field) {
  return region_pullback_degree(energy_density(field), Region::whole_sphere());
}

double degree_from_energies(const MapField& field) { return energy_report(field).degree_energy; }

long round_degree(double d) {
  const double f = std::floor(d);
  const double frac = d - f;
  if (frac > 0.5) return static_cast<long>(f) + 1;
  if (frac < 0.5) return static_cast<long>(f);
  // exact tie: toward zero
  return d > 0 ? static_cast<long>(f) : static_cast<long>(f) + 1;
}

TensionField compute_tension(const MapField& field) {
  const auto& g = field.geometry();
  const int n = g.n;
  const double h = g.h;
  TensionField t;
  t.geometry = field.geometry_ptr();
  for (ChartId chart : kCharts) {
    const int c = ci(chart);
    const std::size_t count = static_cast<std::size_t>(n) * n;
    t.raw[c].assign(count, Vec3::Zero());
    t.projected[c].assign(count, Vec3::Zero());
    const auto& u = field.grid(chart).values;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int j = kStencilReach; j < n - kStencilReach; ++j) {
      for (int i = kStencilReach; i < n - kStencilReach; ++i) {
        const int k = g.index(i, j);
        const auto d = detail::derivatives(u, k, n, h);
        const double inv_s2 = 1.0 / (g.sigma[k] * g.sigma[k]);
        const Vec3 raw = (d.lap + (d.ux.squaredNorm() + d.uy.squaredNorm()) * u[k]) * inv_s2;
        t.raw[c][k] = raw;
        t.projected[c][k] = raw - raw.dot(u[k]) * u[k];
      }
    }
  }
  return t;
}

double TensionField::max_normal_component(const MapField& field) const {
  const auto& g = *geometry;
  double m = 0.0;
  for (ChartId chart : kCharts) {
    const auto& u = field.grid(chart).values;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!g.interior[k] || g.weight[k] == 0.0) continue;
      m = std::max(m, std::abs(raw[ci(chart)][k].dot(u[k])));
    }
  }
  return m;
}

double tension_l2(const TensionField& t) {
  const auto& g = *t.geometry;
  const double h2 = g.h * g.h;
  const double s = weighted_sum(g, [&](ChartId chart, int k) {
    return t.projected[ci(chart)][k].squaredNorm() * g.sigma[k] * g.sigma[k] * h2;
  });
  return std::sqrt(s);
}

double tension_sup(const TensionField& t) {
  const auto& g = *t.geometry;
  double m = 0.0;
  for (ChartId chart : kCharts) {
    for (std::size_t k = 0; k < g.weight.size(); ++k) {
      if (g.weight[k] == 0.0) continue;
      m = std::max(m, t.projected[ci(chart)][k].norm());
    }
  }
  return m;
}

double tension_inner(const TensionField& t, const TangentField& v) {
  const auto& g = *t.geometry;
  const double h2 = g.h * g.h;
  return weighted_sum(g, [&](ChartId chart, int k) {
    return t.projected[ci(chart)][k].dot(v.chart(chart)[k]) * g.sigma[k] * g.sigma[k] * h2;
  });
}

double repulsion_norm(const DensityField& dens, double q) {
  if (!(q >= 1.0 && q < 2.0)) throw Error(ErrorKind::InvalidExponent, "repulsion exponent q must lie in [1, 2)");
  const auto& g = *dens.geometry;
  const double h2 = g.h * g.h;
  const double s = weighted_sum(g, [&](ChartId chart, int k) {
    const double prod = dens.e_d[ci(chart)][k] * dens.e_db[ci(chart)][k];
    return std::pow(prod, 0.5 * q) * g.sigma[k] * g.sigma[k] * h2;
  });
  return std::pow(s, 1.0 / q);
}

namespace {

double sample_density(const DensityField& dens, const std::vector<double>& north, const std::vector<double>& south,
                      const SpherePoint& p) {
  const auto& g = *dens.geometry;
  const ChartId chart = owning_chart(p);
  const Complex z = sphere_to_stereo(p, chart);
  const auto& v = chart == ChartId::North ? north : south;
  const double fx = (z.real() + g.half_width) / g.h;
  const double fy = (z.imag() + g.half_width) / g.h;
  const int i = static_cast<int>(std::floor(fx));
  const int j = static_cast<int>(std::floor(fy));
  if (i < kStencilReach || j < kStencilReach || i + 1 >= g.n - kStencilReach || j + 1 >= g.n - kStencilReach) {
    throw Error(ErrorKind::CircleOutOfRange, "circle sample outside the valid density region");
  }
  const double tx = fx - i;
  const double ty = fy - j;
  return (1 - tx) * (1 - ty) * v[g.index(i, j)] + tx * (1 - ty) * v[g.index(i + 1, j)] +
         (1 - tx) * ty * v[g.index(i, j + 1)] + tx * ty * v[g.index(i + 1, j + 1)];
}

}  // namespace

double circle_average(const DensityField& dens, const SpherePoint& center_in, double r, EnergyKind kind) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "circle radius must be positive");
  const auto& g = *dens.geometry;
  const SpherePoint c = center_in.normalized();
  // Orthonormal frame of the tangent plane at c.
  const Vec3 seed = std::abs(c.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  const Vec3 e1 = (seed - seed.dot(c) * c).normalized();
  const Vec3 e2 = c.cross(e1);
  const double theta = stereo_to_geodesic_radius(r);
  const int m = std::max(64, 8 * static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / g.h)));
  const auto& north = dens.of(kind, ChartId::North);
  const auto& south = dens.of(kind, ChartId::South);
  std::vector<double> samples(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    const double phi = 2.0 * std::numbers::pi * s / m;
    const SpherePoint p =
        (std::cos(theta) * c + std::sin(theta) * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
    samples[s] = sample_density(dens, north, south, p);
  }
  return par::ordered_sum(samples) / m;
}

}  // namespace hmflow
