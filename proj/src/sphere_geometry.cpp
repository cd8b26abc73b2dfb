#include "hmflow/sphere_geometry.hpp"

#include <cmath>
#include <iostream>

#include "hmflow/errors.hpp"

namespace hmflow {

namespace {
// Relative slack applied to closed boundaries so that points computed to be
// exactly on a circle are not lost to rounding.
constexpr double kBoundarySlack = 1e-12;
}  // namespace

ChartId other(ChartId chart) { return chart == ChartId::North ? ChartId::South : ChartId::North; }

SpherePoint stereo_to_sphere(Complex z, ChartId chart) {
  const double r2 = std::norm(z);
  const double s = 1.0 / (1.0 + r2);
  if (chart == ChartId::North) {
    return SpherePoint(2.0 * z.real() * s, 2.0 * z.imag() * s, (1.0 - r2) * s);
  }
  return SpherePoint(2.0 * z.real() * s, -2.0 * z.imag() * s, (r2 - 1.0) * s);
}

Complex sphere_to_stereo(const SpherePoint& p, ChartId chart) {
  // Distance to the excluded pole: (0,0,-1) for North, (0,0,1) for South.
  const double pole_z = chart == ChartId::North ? -1.0 : 1.0;
  const double dist = std::sqrt(p.x() * p.x() + p.y() * p.y() + (p.z() - pole_z) * (p.z() - pole_z));
  if (dist <= kPoleTolerance) {
    throw Error(ErrorKind::PoleSingular, "point coincides with the excluded pole of the chart");
  }
  if (chart == ChartId::North) {
    const double d = 1.0 + p.z();
    return {p.x() / d, p.y() / d};
  }
  const double d = 1.0 - p.z();
  return {p.x() / d, -p.y() / d};
}

double conformal_factor(Complex z) { return 2.0 / (1.0 + std::norm(z)); }

Complex chart_transition(Complex z, ChartId /*from*/) {
  if (std::abs(z) <= kPoleTolerance) {
    throw Error(ErrorKind::PoleSingular, "chart transition at the chart origin");
  }
  return 1.0 / z;
}

ChartId owning_chart(const SpherePoint& p) { return p.z() >= 0.0 ? ChartId::North : ChartId::South; }

double stereo_to_geodesic_radius(double r) { return 2.0 * std::atan(r); }

double geodesic_to_stereo_radius(double theta) { return std::tan(0.5 * theta); }

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

Region Region::whole_sphere() { return Region{}; }

Region Region::disk(const SpherePoint& center, double r) {
  Region reg;
  reg.kind = Kind::Disk;
  reg.center = center.normalized();
  reg.outer_radius = r;
  reg.validate();
  return reg;
}

Region Region::annulus(const SpherePoint& center, double inner, double outer) {
  Region reg;
  reg.kind = Kind::Annulus;
  reg.center = center.normalized();
  reg.inner_radius = inner;
  reg.outer_radius = outer;
  reg.validate();
  return reg;
}

Region Region::disk_complement(std::vector<std::pair<SpherePoint, double>> holes) {
  Region reg;
  reg.kind = Kind::DiskComplement;
  for (auto& [c, r] : holes) c.normalize();
  reg.holes = std::move(holes);
  reg.validate();
  return reg;
}

void Region::validate() const {
  switch (kind) {
    case Kind::WholeSphere:
      return;
    case Kind::Disk:
      if (!(outer_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "disk radius must be positive");
      return;
    case Kind::Annulus:
      if (!(inner_radius > 0.0) || !(inner_radius < outer_radius)) {
        throw Error(ErrorKind::InvalidArgument, "annulus requires 0 < inner_radius < outer_radius");
      }
      return;
    case Kind::DiskComplement:
      for (std::size_t i = 0; i < holes.size(); ++i) {
        if (!(holes[i].second > 0.0)) throw Error(ErrorKind::InvalidArgument, "hole radius must be positive");
        for (std::size_t j = i + 1; j < holes.size(); ++j) {
          const double d = geodesic_distance(holes[i].first, holes[j].first);
          const double reach = stereo_to_geodesic_radius(2.0 * holes[i].second) +
                               stereo_to_geodesic_radius(2.0 * holes[j].second);
          if (d < reach) {
            std::cerr << "warning: doubled disks " << i << " and " << j << " of a DiskComplement overlap\n";
          }
        }
      }
      return;
  }
}

namespace {

// Stereographic radius of p in the chart centered at c.
double centered_radius(const SpherePoint& c, const SpherePoint& p) {
  return std::tan(0.5 * geodesic_distance(c, p));
}

bool in_closed_disk(const SpherePoint& c, double r, const SpherePoint& p) {
  return centered_radius(c, p) <= r * (1.0 + kBoundarySlack);
}

}  // namespace

bool region_contains(const Region& region, const SpherePoint& p) {
  switch (region.kind) {
    case Region::Kind::WholeSphere:
      return true;
    case Region::Kind::Disk:
      return in_closed_disk(region.center, region.outer_radius, p);
    case Region::Kind::Annulus: {
      const double r = centered_radius(region.center, p);
      return r >= region.inner_radius * (1.0 - kBoundarySlack) && r <= region.outer_radius * (1.0 + kBoundarySlack);
    }
    case Region::Kind::DiskComplement:
      for (const auto& [c, r] : region.holes) {
        if (in_closed_disk(c, r, p)) return false;
      }
      return true;
  }
  return false;
}

}  // namespace hmflow
