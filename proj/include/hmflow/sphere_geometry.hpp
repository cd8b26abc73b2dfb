#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <utility>
#include <vector>

namespace hmflow {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

// Points of the unit sphere in R^3. Kept as a plain vector; every operation
// that produces one returns it normalized.
using SpherePoint = Vec3;

/// The two stereographic charts. North is centered at (0,0,1) with
/// coordinate z; South is centered at (0,0,-1) with coordinate w = 1/z.
enum class ChartId { North, South };

ChartId other(ChartId chart);

inline constexpr double kPoleTolerance = 1e-9;

SpherePoint stereo_to_sphere(Complex z, ChartId chart);

/// Throws PoleSingular when p is within kPoleTolerance of the pole the chart
/// cannot represent.
Complex sphere_to_stereo(const SpherePoint& p, ChartId chart);

/// 2 / (1 + |z|^2).
double conformal_factor(Complex z);

/// Coordinate of the same sphere point in the other chart (w = 1/z in both
/// directions).
Complex chart_transition(Complex z, ChartId from);

/// Chart whose coordinate of p has modulus <= 1 (North on the equator).
ChartId owning_chart(const SpherePoint& p);

// Conversions between stereographic radius r of D_r(x) and the geodesic radius
// 2 arctan(r) of the same ball.
double stereo_to_geodesic_radius(double r);
double geodesic_to_stereo_radius(double theta);

double geodesic_distance(const SpherePoint& a, const SpherePoint& b);

/// Closed regions on the sphere. Radii are always stereographic radii r of the
/// chart centered at `center`, so Disk(x, r) = B_{2 arctan r}(x).
struct Region {
  enum class Kind { Disk, Annulus, DiskComplement, WholeSphere };

  Kind kind = Kind::WholeSphere;
  SpherePoint center = SpherePoint(0, 0, 1);
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  // Only used by DiskComplement.
  std::vector<std::pair<SpherePoint, double>> holes;

  static Region whole_sphere();
  static Region disk(const SpherePoint& center, double r);
  /// Closed annulus {inner <= r <= outer} about center.
  static Region annulus(const SpherePoint& center, double inner, double outer);
  /// S^2 minus the union of closed disks; warns on stderr if the doubled
  /// disks are not pairwise disjoint.
  static Region disk_complement(std::vector<std::pair<SpherePoint, double>> holes);

  void validate() const;
};

bool region_contains(const Region& region, const SpherePoint& p);

}  // namespace hmflow
