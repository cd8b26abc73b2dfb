#include "hmflow/analytic_maps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmflow/errors.hpp"

namespace hmflow {

namespace {

std::vector<Complex> trimmed(const std::vector<Complex>& c) {
  std::vector<Complex> out = c;
  while (!out.empty() && out.back() == Complex(0.0)) out.pop_back();
  return out;
}

int poly_degree(const std::vector<Complex>& c) { return static_cast<int>(trimmed(c).size()) - 1; }

// Coefficients padded with zeros to degree d.
std::vector<Complex> padded(const std::vector<Complex>& c, int d) {
  std::vector<Complex> out(static_cast<std::size_t>(d + 1), Complex(0.0));
  std::copy_n(c.begin(), std::min(c.size(), out.size()), out.begin());
  return out;
}

// Horner evaluation of the polynomial and its derivative.
std::pair<Complex, Complex> horner(const std::vector<Complex>& c, Complex x) {
  Complex v = 0.0;
  Complex dv = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dv = dv * x + v;
    v = v * x + *it;
  }
  return {v, dv};
}

// The map in homogeneous form (A : B) = (p : q) written in one domain chart.
// For the South chart the coefficient lists are reversed, since
// p(1/w)/q(1/w) = (w^d p(1/w)) / (w^d q(1/w)).
struct ChartPolys {
  std::vector<Complex> num;
  std::vector<Complex> den;
};

ChartPolys chart_polys(const RationalMapSpec& spec, ChartId chart) {
  const int d = std::max(spec.degree(), 0);
  ChartPolys cp{padded(spec.numerator, d), padded(spec.denominator, d)};
  if (chart == ChartId::South) {
    std::reverse(cp.num.begin(), cp.num.end());
    std::reverse(cp.den.begin(), cp.den.end());
  }
  return cp;
}

SpherePoint from_homogeneous(Complex a, Complex b) {
  const Complex c = a * std::conj(b);
  const double na = std::norm(a);
  const double nb = std::norm(b);
  const double d = na + nb;
  return SpherePoint(2.0 * c.real() / d, 2.0 * c.imag() / d, (nb - na) / d);
}

MapJet jet_from_homogeneous(Complex a, Complex b, Complex da_x, Complex db_x, Complex da_y, Complex db_y) {
  const double d = std::norm(a) + std::norm(b);
  MapJet jet;
  jet.u = from_homogeneous(a, b);
  auto directional = [&](Complex da, Complex db) {
    const Complex dc = da * std::conj(b) + a * std::conj(db);
    const double dna = 2.0 * (std::conj(a) * da).real();
    const double dnb = 2.0 * (std::conj(b) * db).real();
    const Vec3 dn(2.0 * dc.real(), 2.0 * dc.imag(), dnb - dna);
    return Vec3((dn - jet.u * (dna + dnb)) / d);
  };
  jet.u_x = directional(da_x, db_x);
  jet.u_y = directional(da_y, db_y);
  return jet;
}

Complex chart_argument(const RationalMapSpec& spec, Complex coord) {
  return spec.orientation == Orientation::Holomorphic ? coord : std::conj(coord);
}

}  // namespace

RationalMapSpec RationalMapSpec::identity() { return {{0.0, 1.0}, {1.0}, Orientation::Holomorphic}; }

RationalMapSpec RationalMapSpec::conjugation() { return {{0.0, 1.0}, {1.0}, Orientation::Antiholomorphic}; }

RationalMapSpec RationalMapSpec::constant(Complex value) { return {{value}, {1.0}, Orientation::Holomorphic}; }

RationalMapSpec RationalMapSpec::monomial(int power, Orientation orientation) {
  std::vector<Complex> mono(static_cast<std::size_t>(std::abs(power) + 1), Complex(0.0));
  mono.back() = 1.0;
  if (power >= 0) return {mono, {1.0}, orientation};
  return {{1.0}, mono, orientation};
}

int RationalMapSpec::degree() const {
  return std::max({poly_degree(numerator), poly_degree(denominator), 0});
}

int RationalMapSpec::signed_degree() const {
  return orientation == Orientation::Holomorphic ? degree() : -degree();
}

double normalized_resultant(const std::vector<Complex>& p_in, const std::vector<Complex>& q_in) {
  const auto p = trimmed(p_in);
  const auto q = trimmed(q_in);
  if (p.empty() || q.empty()) {
    // The zero polynomial shares every root of the other one; two zero
    // polynomials, or zero against a nonzero constant, are handled by caller.
    const auto& other_poly = p.empty() ? q : p;
    return other_poly.size() == 1 ? 1.0 : 0.0;
  }
  const int m = static_cast<int>(p.size()) - 1;
  const int n = static_cast<int>(q.size()) - 1;
  if (m + n == 0) return 1.0;
  auto scale = [](const std::vector<Complex>& c) {
    double s = 0.0;
    for (auto v : c) s = std::max(s, std::abs(v));
    return s;
  };
  const double sp = scale(p);
  const double sq = scale(q);
  const int size = m + n;
  Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(size, size);
  // Rows hold descending-degree coefficients, shifted.
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k <= m; ++k) syl(r, r + k) = p[static_cast<std::size_t>(m - k)] / sp;
  }
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k <= n; ++k) syl(n + r, r + k) = q[static_cast<std::size_t>(n - k)] / sq;
  }
  return std::abs(syl.partialPivLu().determinant());
}

void RationalMapSpec::validate() const {
  const auto q = trimmed(denominator);
  if (q.empty()) throw Error(ErrorKind::DegenerateSpec, "denominator vanishes identically");
  const auto p = trimmed(numerator);
  if (p.empty() && q.size() > 1) {
    throw Error(ErrorKind::DegenerateSpec, "zero numerator over a nonconstant denominator");
  }
  if (!p.empty() && normalized_resultant(p, q) <= 1e-10) {
    throw Error(ErrorKind::DegenerateSpec, "numerator and denominator share a root (resultant below 1e-10)");
  }
}

SpherePoint RationalMapSpec::value_at_infinity() const {
  const auto cp = chart_polys(*this, ChartId::South);
  return from_homogeneous(cp.num.front(), cp.den.front());
}

SpherePoint eval_map(const RationalMapSpec& spec, ChartId chart, Complex coord) {
  const auto cp = chart_polys(spec, chart);
  const Complex x = chart_argument(spec, coord);
  const Complex a = horner(cp.num, x).first;
  const Complex b = horner(cp.den, x).first;
  if (std::norm(a) + std::norm(b) == 0.0) {
    throw Error(ErrorKind::DegenerateSpec, "numerator and denominator vanish together");
  }
  return from_homogeneous(a, b);
}

SpherePoint eval_map(const RationalMapSpec& spec, Complex z) { return eval_map(spec, ChartId::North, z); }

MapJet eval_derivatives(const RationalMapSpec& spec, ChartId chart, Complex coord) {
  const auto cp = chart_polys(spec, chart);
  const bool holo = spec.orientation == Orientation::Holomorphic;
  const Complex x = chart_argument(spec, coord);
  const auto [a, da] = horner(cp.num, x);
  const auto [b, db] = horner(cp.den, x);
  if (std::norm(a) + std::norm(b) == 0.0) {
    throw Error(ErrorKind::DegenerateSpec, "numerator and denominator vanish together");
  }
  // d/dRe = d/dx, d/dIm = +i d/dx for holomorphic, -i d/dx for conj argument.
  const Complex iy = holo ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
  return jet_from_homogeneous(a, b, da, db, iy * da, iy * db);
}

MapJet eval_derivatives(const RationalMapSpec& spec, Complex z) {
  return eval_derivatives(spec, ChartId::North, z);
}

namespace {

double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

SpherePoint geodesic_blend(const SpherePoint& a, const SpherePoint& b, double t) {
  const double theta = geodesic_distance(a, b);
  if (theta > 0.5 * std::numbers::pi) {
    throw Error(ErrorKind::GluingMismatch, "gluing geodesic longer than pi/2");
  }
  if (theta < 1e-15) return a;
  const double st = std::sin(theta);
  SpherePoint p = (std::sin((1.0 - t) * theta) / st) * a + (std::sin(t * theta) / st) * b;
  return p.normalized();
}

}  // namespace

void BubbleSpec::validate() const {
  body.validate();
  if (!(cutoff_width > 1.0 && cutoff_width <= 4.0)) {
    throw Error(ErrorKind::InvalidArgument, "cutoff_width must lie in (1, 4]");
  }
  double max_scale = 0.0;
  for (const auto& b : bubbles) {
    b.map.validate();
    if (!(b.scale > 0.0 && b.scale <= 0.25)) throw Error(ErrorKind::InvalidArgument, "bubble scale must lie in (0, 0.25]");
    max_scale = std::max(max_scale, b.scale);
    const SpherePoint at_inf = b.map.value_at_infinity();
    const SpherePoint body_val = eval_map(body, b.attach_point);
    if ((at_inf - body_val).norm() > kGluingTolerance) {
      throw Error(ErrorKind::GluingMismatch, "bubble value at infinity differs from the body value at its attach point");
    }
  }
  for (std::size_t i = 0; i < bubbles.size(); ++i) {
    for (std::size_t j = i + 1; j < bubbles.size(); ++j) {
      const double d = std::abs(bubbles[i].attach_point - bubbles[j].attach_point);
      if (d < 4.0 * max_scale) throw Error(ErrorKind::InvalidArgument, "attach points closer than 4 * max scale");
      const double reach = cutoff_width * (std::sqrt(bubbles[i].scale) + std::sqrt(bubbles[j].scale));
      if (d < reach) throw Error(ErrorKind::InvalidArgument, "gluing annuli of two bubbles overlap");
    }
  }
}

int BubbleSpec::expected_degree() const {
  int d = body.signed_degree();
  for (const auto& b : bubbles) d += b.map.signed_degree();
  return d;
}

SpherePoint glue(const BubbleSpec& spec, ChartId chart, Complex coord) {
  Complex z;
  if (chart == ChartId::North) {
    z = coord;
  } else {
    if (std::abs(coord) < 1e-12) return eval_map(spec.body, chart, coord);
    z = 1.0 / coord;
  }
  for (const auto& b : spec.bubbles) {
    const double r = std::abs(z - b.attach_point);
    const double inner = std::sqrt(b.scale);
    const double outer = spec.cutoff_width * inner;
    if (r >= outer) continue;
    const SpherePoint in = eval_map(b.map, (z - b.attach_point) / b.scale);
    if (r <= inner) return in;
    const SpherePoint out = eval_map(spec.body, chart, coord);
    return geodesic_blend(in, out, smoothstep5((r - inner) / (outer - inner)));
  }
  return eval_map(spec.body, chart, coord);
}

SpherePoint glue(const BubbleSpec& spec, Complex z) { return glue(spec, ChartId::North, z); }

MapSource make_source(RationalMapSpec spec) {
  spec.validate();
  return [spec = std::move(spec)](ChartId chart, Complex coord) { return eval_map(spec, chart, coord); };
}

MapSource make_source(BubbleSpec spec) {
  spec.validate();
  return [spec = std::move(spec)](ChartId chart, Complex coord) { return glue(spec, chart, coord); };
}

Complex LaurentForm::coefficient(int n) const {
  if (n < n_min || n > n_max()) return 0.0;
  return coefficients[static_cast<std::size_t>(n - n_min)];
}

void LaurentForm::validate() const {
  if (std::none_of(coefficients.begin(), coefficients.end(), [](Complex c) { return c != Complex(0.0); })) {
    throw Error(ErrorKind::InvalidArgument, "Laurent form needs at least one nonzero coefficient");
  }
}

LaurentForm LaurentForm::monomial(int n, Complex a) { return LaurentForm{n, {a}}; }

double laurent_F(const LaurentForm& form, double r) {
  double s = 0.0;
  for (std::size_t k = 0; k < form.coefficients.size(); ++k) {
    const int n = form.n_min + static_cast<int>(k);
    s += std::norm(form.coefficients[k]) * std::pow(r, 2.0 * n);
  }
  return std::sqrt(s);
}

}  // namespace hmflow
