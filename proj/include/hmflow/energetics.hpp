#pragma once

#include <array>
#include <memory>
#include <vector>

#include "hmflow/map_field.hpp"
#include "hmflow/sphere_geometry.hpp"

namespace hmflow {

enum class EnergyKind { Total, Holomorphic, Antiholomorphic };

/// Chart-wise energy densities with respect to the round metric of the domain:
/// e_d = |u_x - u x u_y|^2 / (4 sigma^2), e_db = |u_x + u x u_y|^2 / (4 sigma^2),
/// e = e_d + e_db. Only interior nodes carry values; the rest are zero.
struct DensityField {
  std::shared_ptr<const GridGeometry> geometry;
  std::array<std::vector<double>, 2> e;
  std::array<std::vector<double>, 2> e_d;
  std::array<std::vector<double>, 2> e_db;
  // Pullback of the area form, u . (u_x x u_y), per unit coordinate area.
  std::array<std::vector<double>, 2> pullback;

  const std::vector<double>& of(EnergyKind kind, ChartId chart) const;
};

DensityField energy_density(const MapField& field);

/// Integral of the chosen density over the region. Charts are combined with
/// the partition-of-unity weights of the grid geometry.
double region_energy(const DensityField& dens, const Region& region, EnergyKind kind);

/// (1 / 4 pi) times the integral of the pulled-back area form over the region.
double region_pullback_degree(const DensityField& dens, const Region& region);

struct EnergyReport {
  Region region;
  double E = 0.0;
  double E_d = 0.0;
  double E_db = 0.0;
  // kappa = E_d - E_db, the integral of u^* omega; equals 4 pi deg(u) on the
  // whole sphere, so E = kappa + 2 E_db.
  double kappa = 0.0;
  double degree_energy = 0.0;
  double degree_pullback = 0.0;
};

EnergyReport energy_report(const DensityField& dens, const Region& region = Region::whole_sphere());
EnergyReport energy_report(const MapField& field, const Region& region = Region::whole_sphere());

double degree_from_pullback(const MapField& field);
double degree_from_energies(const MapField& field);

/// Nearest integer, ties toward zero.
long round_degree(double d);

/// T(u) = sigma^-2 (Laplacian u + |grad u|^2 u) at interior nodes, plus its
/// projection onto the tangent plane of u. `valid` marks the interior nodes.
struct TensionField {
  std::shared_ptr<const GridGeometry> geometry;
  std::array<std::vector<Vec3>, 2> raw;
  std::array<std::vector<Vec3>, 2> projected;

  const std::vector<std::uint8_t>& valid() const { return geometry->interior; }
  /// Largest |T . u| over interior nodes, for the tangency check.
  double max_normal_component(const MapField& field) const;
};

TensionField compute_tension(const MapField& field);

/// ||T||_{L^2(S^2)} = || sigma T ||_{L^2(R^2)} of the projected field.
double tension_l2(const TensionField& t);

/// Sup over interior nodes with nonzero partition weight of |T|.
double tension_sup(const TensionField& t);

/// <T, v>_{L^2(S^2)} with the projected tension.
double tension_inner(const TensionField& t, const TangentField& v);

/// || sqrt(e_d e_db) ||_{L^q(S^2)} for q in [1, 2).
double repulsion_norm(const DensityField& dens, double q);

/// Mean over theta of the density on the geodesic circle of stereographic
/// radius r about center, from bilinear samples in the owning chart at
/// max(64, 8 ceil(2 pi r / h)) equispaced angles.
double circle_average(const DensityField& dens, const SpherePoint& center, double r, EnergyKind kind);

}  // namespace hmflow
