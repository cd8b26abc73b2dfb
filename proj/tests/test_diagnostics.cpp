#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hmflow/diagnostics.hpp"
#include "hmflow/errors.hpp"

using namespace hmflow;

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// z -> 1 / conj(z): antiholomorphic, value (0,0,1) at infinity.
RationalMapSpec inverse_conjugate() { return {{1.0}, {0.0, 1.0}, Orientation::Antiholomorphic}; }

BubbleSpec single_bubble(double lambda, Complex at = 0.0) {
  BubbleSpec g;
  g.body = RationalMapSpec::constant(0.0);
  g.bubbles.push_back({at, lambda, inverse_conjugate()});
  return g;
}

// Energy of {rho/2 <= |z - p| <= rho} for the exact bubble of scale lambda:
// the image is an annulus of stereographic radii lambda/rho .. 2 lambda/rho.
double bubble_half_annulus(double rho, double lambda) {
  const double c2 = (rho / lambda) * (rho / lambda);
  return kFourPi * (4.0 / (c2 + 4.0) - 1.0 / (c2 + 1.0));
}

// Outer root of bubble_half_annulus(rho, lambda) = epsilon, in units of lambda.
double outer_ratio(double epsilon) {
  const double k = epsilon / kFourPi;
  const double b = 3.0 - 5.0 * k;
  return std::sqrt((b + std::sqrt(b * b - 16.0 * k * k)) / (2.0 * k));
}

std::vector<LojSample> power_law(double coef, double alpha, int count) {
  std::vector<LojSample> out;
  for (int k = 0; k < count; ++k) {
    const double delta = std::pow(10.0, -0.5 * k);
    LojSample s;
    REQUIRE(make_loj_sample("synthetic", delta, coef * std::pow(delta, alpha), 0.0, s));
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("distance to the 4 pi lattice") {
  auto a = dist_to_4pi_lattice(kFourPi);
  CHECK(a.n == 1);
  CHECK(a.dist == 0.0);
  a = dist_to_4pi_lattice(12.7);
  CHECK(a.n == 1);
  CHECK(a.dist == doctest::Approx(12.7 - kFourPi).epsilon(1e-14));
  CHECK(a.dist == doctest::Approx(0.13363).epsilon(1e-4));
  a = dist_to_4pi_lattice(2.0 * std::numbers::pi);
  CHECK(a.n == 0);
  CHECK(a.dist == 2.0 * std::numbers::pi);
  CHECK(dist_to_4pi_lattice(0.0).n == 0);
  CHECK_THROWS_AS(dist_to_4pi_lattice(-1.0), Error);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  for (int k = 0; k < 1000; ++k) {
    const double e = u(rng);
    const auto p = dist_to_4pi_lattice(e), q = dist_to_4pi_lattice(e + kFourPi);
    CHECK(q.n == p.n + 1);
    CHECK(q.dist == doctest::Approx(p.dist).epsilon(1e-12).scale(1.0));
    CHECK(p.dist <= 2.0 * std::numbers::pi + 1e-12);
  }
}

TEST_CASE("outer energy scale on the identity and vacuous thresholds") {
  const auto f = sample_field(make_source(RationalMapSpec::identity()), 129);
  const auto d = energy_density(f);
  const Vec3 north(0, 0, 1);
  // Every half-annulus {rho/2 <= r <= rho} of the identity carries its area,
  // 4 pi (rho^2/(1+rho^2) - rho^2/(4+rho^2)); at rho = R = 1 that is 3.77, so
  // a threshold below it is met at R itself.
  const auto s = outer_energy_scale(d, north, 0.3, 1.0);
  CHECK(s.lambda == 1.0);
  CHECK(outer_energy_scale(d, north, 4.0, 1.0).lambda == 0.0);
  CHECK(outer_energy_scale(d, north, 20.0, 1.0).lambda == 0.0);
  // Inner threshold: smallest annulus area above epsilon.
  const auto t = outer_energy_scale(d, north, 0.3, 0.25);
  // area(rho) = 0.3 at rho ~ 0.178
  CHECK(t.lambda == doctest::Approx(0.1778).epsilon(0.06));
  CHECK_THROWS_AS(outer_energy_scale(d, north, 0.0, 1.0), Error);
  CHECK_THROWS_AS(outer_energy_scale(d, north, 0.3, 1.5), Error);
}

TEST_CASE("outer energy scale of a glued bubble against the exact annulus table") {
  const double lambda = 0.1, eps = 3.9;
  const auto f = sample_field(make_source(single_bubble(lambda)), 257);
  const auto d = energy_density(f);
  const RadialEnergy radial(d, Vec3(0, 0, 1));
  // Dyadic table inside the exact-bubble disk |z| <= sqrt(lambda).
  for (double rho = std::sqrt(lambda); rho > 0.05; rho /= 2.0) {
    CAPTURE(rho);
    // sharp annulus edges make the node sum first order in h / rho
    CHECK(radial.half_annulus(rho) == doctest::Approx(bubble_half_annulus(rho, lambda)).epsilon(0.03));
  }
  const auto s = outer_energy_scale(d, Vec3(0, 0, 1), eps, 1.0);
  const double oracle = outer_ratio(eps) * lambda;
  CHECK(s.lambda <= oracle * 1.02);
  CHECK(s.lambda >= oracle / 1.08);
  CHECK(s.lambda / lambda <= 2.0);
  CHECK(s.lambda / lambda >= 0.5);
  CHECK_FALSE(s.resolution_floor);

  // Antitone in epsilon.
  double prev = 2.0;
  for (double e : {0.3, 1.0, 2.0, 3.0, 3.9, 4.1, 5.0}) {
    const double l = outer_energy_scale(d, Vec3(0, 0, 1), e, 1.0).lambda;
    CHECK(l <= prev);
    prev = l;
  }
}

TEST_CASE("bubble detection") {
  const auto c = sample_field(make_source(RationalMapSpec::constant(Complex(0.3, 0.3))), 129);
  CHECK(detect_bubbles(c, 0.3).empty());

  const double lambda = 0.05;
  const Complex at(0.2, -0.1);
  const auto one = detect_bubbles(sample_field(make_source(single_bubble(lambda, at)), 257), 3.9);
  REQUIRE(one.size() == 1);
  CHECK(geodesic_distance(one[0].center, stereo_to_sphere(at, ChartId::North)) <= 2.0 * lambda);

  BubbleSpec two;
  two.body = RationalMapSpec::constant(0.0);
  two.cutoff_width = 1.5;
  two.bubbles.push_back({Complex(-0.35, 0.0), 0.04, inverse_conjugate()});
  two.bubbles.push_back({Complex(0.35, 0.0), 0.04, inverse_conjugate()});
  const auto found = detect_bubbles(sample_field(make_source(two), 257), 3.9);
  CHECK(found.size() == 2);
}

TEST_CASE("annulus profiles and sups") {
  const auto d = energy_density(sample_field(make_source(RationalMapSpec::identity()), 257));
  const auto prof = annulus_profile(d, Vec3(0, 0, 1), 0, 0.05, 0.8, 0.0);
  REQUIRE(prof.radii.size() > 10);
  for (std::size_t k = 1; k < prof.radii.size(); ++k) CHECK(prof.radii[k] > prof.radii[k - 1]);
  // Identity: e_d = 1, so f = 1 and the unweighted sup is 1.
  CHECK(annulus_sup(prof, 0.05, 0.8) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(annulus_sup(prof, 0.1, 0.3) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(annulus_sup(prof, 0.01, 0.5), Error);

  // Floor delta / xi.
  const auto floored = annulus_profile(d, Vec3(0, 0, 1), 0, 0.05, 0.8, 0.1, 1e-2);
  for (double v : floored.values) CHECK(v >= 10.0 - 1e-12);

  // g = z with weight r^-1: constant 1.
  const auto mono = annulus_profile(LaurentForm::monomial(1), 1, 0.01, 10.0);
  CHECK(annulus_sup(mono, 0.01, 0.1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(annulus_sup(mono, 1.0, 10.0) == doctest::Approx(1.0).epsilon(1e-14));
  // n = 0 is the plain maximum.
  const auto g1 = annulus_profile(LaurentForm{0, {1.0, 1.0}}, 0, 0.1, 2.0);
  double mx = 0.0;
  for (double v : g1.values) mx = std::max(mx, v);
  CHECK(annulus_sup(g1, 0.1, 2.0) == mx);
  SupWeight w;
  w.mode = SupWeight::Mode::InnerRatio;
  w.exponent = 2;
  w.scale = 0.5;
  CHECK(annulus_sup(mono, 1.0, 10.0, w) > annulus_sup(mono, 1.0, 10.0));
}

TEST_CASE("three-annulus check: monomial boundary cases") {
  const double sigma = 2.0, beta = 0.25;
  for (int n = -6; n <= 6; ++n) {
    const auto eq = three_annulus_check(LaurentForm::monomial(n), n, sigma, beta);
    CHECK(eq.S1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eq.S2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eq.S3 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eq.a_hyp);
    CHECK(eq.a_concl);
    CHECK(eq.b_hyp);
    CHECK(eq.b_concl);
    CHECK_FALSE(eq.violated);

    // z^(n+1): S(i) = sigma^(i-1) rho.
    const double rho = 0.7;
    const auto up = three_annulus_check(LaurentForm::monomial(n + 1), n, sigma, beta, rho);
    CHECK(up.S1 == doctest::Approx(rho).epsilon(1e-12));
    CHECK(up.S2 == doctest::Approx(sigma * rho).epsilon(1e-12));
    CHECK(up.S3 == doctest::Approx(sigma * sigma * rho).epsilon(1e-12));
    CHECK(up.a_hyp);
    CHECK(up.a_concl);
    CHECK_FALSE(up.violated);
  }
  CHECK_THROWS_AS(three_annulus_check(LaurentForm::monomial(0), 0, 1.0, beta), Error);
  CHECK_THROWS_AS(three_annulus_check(LaurentForm::monomial(0), 0, sigma, 0.0), Error);
  CHECK_THROWS_AS(three_annulus_check(LaurentForm::monomial(0), 0, sigma, 0.6), Error);
  CHECK_THROWS_AS(three_annulus_check(LaurentForm::monomial(0), 0, sigma, beta, 0.0), Error);
}

TEST_CASE("beta admissibility") {
  // 2 sigma^2 / (sigma^2 + 1) < sigma^(2 beta); at sigma = 2 this needs
  // beta > log2(8/5) / 2 = 0.339.
  CHECK_FALSE(beta_admissible(2.0, 0.25));
  CHECK(beta_admissible(2.0, 0.35));
  CHECK(beta_admissible(2.0, 0.5));
  CHECK_FALSE(three_annulus_check(LaurentForm::monomial(1), 1, 2.0, 0.25).beta_admissible);
}

TEST_CASE("Hadamard convexity") {
  std::vector<double> radii;
  for (int k = 0; k < 64; ++k) radii.push_back(0.25 * std::pow(16.0, k / 63.0));
  CHECK(hadamard_convexity_check(LaurentForm::monomial(1), radii) <= 1e-12);
  CHECK(hadamard_convexity_check(LaurentForm{0, {1.0, 1.0}}, radii) <= 1e-12);
  CHECK(hadamard_convexity_check(LaurentForm{0, {1.0, 1.0}}, radii) < 0.0);
  for (std::uint64_t i = 0; i < 200; ++i) {
    CHECK(hadamard_convexity_check(random_laurent_form(6, 7, i), radii) <= 1e-10);
  }
  CHECK_THROWS_AS(hadamard_convexity_check(LaurentForm::monomial(1), {1.0, 2.0}), Error);
}

TEST_CASE("Laurent sweep") {
  LaurentSweep p;
  p.count = 300;
  const auto r = laurent_sweep(p);
  CHECK(r.checks == 300L * 13);
  CHECK(r.violations == 0);
  CHECK(r.monomials_ok);
  CHECK(r.max_monomial_defect <= 1e-12);
  CHECK(r.max_convexity_defect <= 1e-10);
  CHECK_FALSE(r.beta_admissible);
  // Forms are reproducible from (seed, index).
  const auto a = random_laurent_form(6, 7, 12), b = random_laurent_form(6, 7, 12);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.n_min == -6);
  CHECK(a.n_max() == 6);
}

TEST_CASE("Lojasiewicz exponent fit") {
  const auto two = fit_loj_exponent(power_law(1.0, 2.0, 10));
  CHECK(two.alpha_hat == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(two.r2 == doctest::Approx(1.0).epsilon(1e-10));
  const auto one = fit_loj_exponent(power_law(3.0, 1.0, 10));
  CHECK(one.alpha_hat == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(one.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(one.used == 10);
  try {
    fit_loj_exponent(power_law(1.0, 2.0, 5));
    FAIL("expected InsufficientSpread");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSpread);
  }
  // 9 samples over half a decade.
  std::vector<LojSample> narrow;
  for (int k = 0; k < 9; ++k) {
    LojSample s;
    make_loj_sample("n", 1.0 + 0.3 * k, 1.0 + k, 0.0, s);
    narrow.push_back(s);
  }
  CHECK_THROWS_AS(fit_loj_exponent(narrow), Error);
  LojSample s;
  CHECK_FALSE(make_loj_sample("zero", 1.0, 0.0, 0.0, s));
  CHECK_FALSE(make_loj_sample("nan", std::nan(""), 1.0, 0.0, s));
}

TEST_CASE("perturbation samples of a harmonic map scale quadratically") {
  const auto f = sample_field(make_source(RationalMapSpec::identity()), 129);
  const auto samples = loj_samples_from_perturbations(f, 3, 8);
  CHECK(samples.size() >= 6);
  const auto fit = fit_loj_exponent(samples);
  CHECK(fit.alpha_hat == doctest::Approx(2.0).epsilon(0.1));
  CHECK(fit.r2 > 0.99);
}

TEST_CASE("decay-rate fit") {
  const double alpha = 1.1, c = 1.0;
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k <= 40; ++k) {
    const double t = 0.25 * k;
    pts.emplace_back(t, std::pow(c + (2 - alpha) / alpha * t, alpha / (alpha - 2)));
  }
  const auto fit = fit_decay_rate(pts, alpha);
  CHECK(fit.relative_residual <= 1e-8);
  CHECK(fit.c == doctest::Approx(c).epsilon(1e-6));
  CHECK(fit.predicted.size() == pts.size());
  CHECK_THROWS_AS(fit_decay_rate(pts, 2.0), Error);
  CHECK_THROWS_AS(fit_decay_rate(pts, 0.0), Error);
  try {
    fit_decay_rate(std::vector<std::pair<double, double>>{{0.0, 1.0}}, alpha);
    FAIL("expected WindowEmpty");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowEmpty);
  }
  // Trace overload with a window.
  FlowTrace tr;
  for (const auto& [t, d] : pts) {
    TraceRow r;
    r.t = t;
    r.dist4pi = d;
    tr.rows.push_back(r);
  }
  CHECK(fit_decay_rate(tr, alpha, 2.0, 6.0).relative_residual <= 1e-8);
  CHECK_THROWS_AS(fit_decay_rate(tr, alpha, 20.0, 30.0), Error);
}

}
