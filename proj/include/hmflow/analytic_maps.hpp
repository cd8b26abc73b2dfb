#pragma once

#include <functional>
#include <vector>

#include "hmflow/sphere_geometry.hpp"

namespace hmflow {

enum class Orientation { Holomorphic, Antiholomorphic };

/// A rational map z -> p(z)/q(z) of the Riemann sphere, or its antiholomorphic
/// twin z -> p(conj z)/q(conj z). Coefficients are stored in ascending degree.
struct RationalMapSpec {
  std::vector<Complex> numerator;
  std::vector<Complex> denominator;
  Orientation orientation = Orientation::Holomorphic;

  static RationalMapSpec identity();
  static RationalMapSpec conjugation();
  static RationalMapSpec constant(Complex value);
  static RationalMapSpec monomial(int power, Orientation orientation = Orientation::Holomorphic);

  /// max(deg p, deg q) after trimming zero leading coefficients.
  int degree() const;
  /// +degree for holomorphic maps, -degree for antiholomorphic ones.
  int signed_degree() const;

  /// Throws DegenerateSpec if q vanishes identically or p, q share a root.
  void validate() const;

  /// Value at the point at infinity of the domain.
  SpherePoint value_at_infinity() const;
};

/// Resultant of p and q normalized by the coefficient scales; zero iff the
/// two polynomials share a root.
double normalized_resultant(const std::vector<Complex>& p, const std::vector<Complex>& q);

struct MapJet {
  SpherePoint u;
  Vec3 u_x;
  Vec3 u_y;
};

SpherePoint eval_map(const RationalMapSpec& spec, Complex z);
SpherePoint eval_map(const RationalMapSpec& spec, ChartId chart, Complex coord);

/// Exact chain-rule derivatives with respect to the real and imaginary parts
/// of the chart coordinate.
MapJet eval_derivatives(const RationalMapSpec& spec, Complex z);
MapJet eval_derivatives(const RationalMapSpec& spec, ChartId chart, Complex coord);

struct Bubble {
  Complex attach_point;  // in the body's North coordinate
  double scale = 0.0;    // lambda in (0, 0.25]
  RationalMapSpec map;
};

/// Single-generation bubble configuration. Inside |z - p| <= sqrt(lambda)
/// the map is bubble((z - p) / lambda); outside |z - p| >= w sqrt(lambda) it
/// is the body; in between the two values are joined along the shortest
/// geodesic with the quintic smoothstep 6s^5 - 15s^4 + 10s^3 of
/// s = (|z - p| - sqrt(lambda)) / ((w - 1) sqrt(lambda)).
///
/// This is one admissible gluing; it is not canonical.
struct BubbleSpec {
  RationalMapSpec body;
  std::vector<Bubble> bubbles;
  double cutoff_width = 2.0;

  /// Checks scale and width ranges, attach-point separation, disjoint gluing
  /// annuli, and that each bubble's value at infinity matches the body at its
  /// attach point within 1e-8 (GluingMismatch otherwise).
  void validate() const;

  /// deg(body) plus the signed degrees of the bubbles.
  int expected_degree() const;
};

inline constexpr double kGluingTolerance = 1e-8;

SpherePoint glue(const BubbleSpec& spec, Complex z);
SpherePoint glue(const BubbleSpec& spec, ChartId chart, Complex coord);

/// Evaluation callback used to fill chart grids: (chart, coordinate) -> value.
using MapSource = std::function<SpherePoint(ChartId, Complex)>;

MapSource make_source(RationalMapSpec spec);
MapSource make_source(BubbleSpec spec);

/// Truncated Laurent series sum_{n_min}^{n_max} a_n z^n of a holomorphic
/// 1-form coefficient g(z).
struct LaurentForm {
  int n_min = 0;
  std::vector<Complex> coefficients;  // a_{n_min}, a_{n_min + 1}, ...

  int n_max() const { return n_min + static_cast<int>(coefficients.size()) - 1; }
  Complex coefficient(int n) const;
  void validate() const;

  static LaurentForm monomial(int n, Complex a = 1.0);
};

/// F(r) = sqrt(sum |a_n|^2 r^{2n}), the root-mean-square of g on |z| = r.
double laurent_F(const LaurentForm& form, double r);

}  // namespace hmflow
