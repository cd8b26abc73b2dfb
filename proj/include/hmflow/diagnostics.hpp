#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/analytic_maps.hpp"
#include "hmflow/energetics.hpp"
#include "hmflow/flow.hpp"
#include "hmflow/map_field.hpp"

namespace hmflow {

// ---------------------------------------------------------------- lattice

struct LatticeDistance {
  long n = 0;
  double dist = 0.0;
};

/// n = round(E / 4 pi) with ties toward the lower n; dist = |E - 4 pi n|.
LatticeDistance dist_to_4pi_lattice(double E);

// ---------------------------------------------------------------- scales

struct ScaleDetection {
  SpherePoint center = SpherePoint(0, 0, 1);
  double epsilon = 0.0;
  double R = 0.0;
  double lambda = 0.0;
  bool resolution_floor = false;  // lambda > 0 but below 8h
};

/// Energies of the closed annuli {rho/2 <= r <= rho} about a fixed center for
/// any rho, from one sorted pass over the quadrature nodes.
class RadialEnergy {
 public:
  RadialEnergy(const DensityField& dens, const SpherePoint& center, EnergyKind kind = EnergyKind::Total);
  /// Energy of the closed set {inner <= r <= outer} (stereographic radii).
  double between(double inner, double outer) const;
  double half_annulus(double rho) const { return between(0.5 * rho, rho); }

 private:
  std::vector<double> theta_;
  std::vector<double> cumulative_;  // cumulative_[i] = energy of the first i nodes
};

/// Smallest lambda with sup_{lambda < rho < R} E(U^rho_{rho/2}(center)) < epsilon:
/// geometric scan of rho from R down to 4h (ratio 2^(1/8)), then bisection of
/// the bracketing interval to 5% relative width. Returns the bisection's
/// lower end (an annulus with energy >= epsilon), or 0 if no scanned annulus
/// reaches epsilon.
ScaleDetection outer_energy_scale(const DensityField& dens, const SpherePoint& center, double epsilon, double R = 1.0);
ScaleDetection outer_energy_scale(const MapField& field, const SpherePoint& center, double epsilon, double R = 1.0);

struct BubbleSearch {
  double R = 0.25;                 // outer radius passed to outer_energy_scale
  double candidate_radius = 0.25;  // candidates need e >= epsilon / area(D_r)
  int max_candidates = 256;
};

/// Greedy single-generation bubble search: local maxima of the density above
/// the candidate threshold, strongest first, each measured by
/// outer_energy_scale; candidates inside D_{4 lambda} of an earlier detection
/// are skipped, as are candidates whose scale is 0.
std::vector<ScaleDetection> detect_bubbles(const MapField& field, double epsilon, const BubbleSearch& opts = {});

// ---------------------------------------------------------------- annulus profiles

struct AnnulusProfile {
  SpherePoint center = SpherePoint(0, 0, 1);
  int n = 0;
  std::vector<double> radii;
  std::vector<double> values;
  double floor = 0.0;  // xi^-1 delta, 0 for forms
};

inline constexpr double kProfileRatio = 1.0905077326652577;  // 2^(1/8)

/// f(r) = max(sqrt(circle average of e_d at r), delta / xi) on the geometric
/// grid r_min * ratio^k <= r_max, closed by r_max itself.
AnnulusProfile annulus_profile(const DensityField& dens, const SpherePoint& center, int n, double r_min, double r_max,
                               double delta, double xi = 1e-2, double ratio = kProfileRatio);

/// f(r) = F(r) of the form, the flat-annulus model of the same profile.
AnnulusProfile annulus_profile(const LaurentForm& form, int n, double r_min, double r_max,
                               double ratio = kProfileRatio);

struct SupWeight {
  enum class Mode { Power, InnerRatio, OuterRatio };
  Mode mode = Mode::Power;  // r^-n | (r/scale)^exponent | (scale/r)^exponent
  int exponent = 0;         // unused by Power, which takes the profile's n
  double scale = 1.0;
};

/// Max over profile radii in [r_lo, r_hi] of weight(r) f(r).
double annulus_sup(const AnnulusProfile& profile, double r_lo, double r_hi, const SupWeight& weight = {});

// ---------------------------------------------------------------- Laurent oracle

struct ThreeAnnulusReport {
  double S1 = 0.0, S2 = 0.0, S3 = 0.0;
  // Strengthened flat-annulus forms; `violated` refers to these.
  bool a_hyp = false, a_concl = false, b_hyp = false, b_concl = false;
  bool violated = false;
  // The beta forms S(1) <= sigma^(1-beta) S(2) => S(2) < sigma^beta S(3) and
  // its mirror. Only implied by the strengthened forms when beta_admissible.
  bool beta_admissible = false;
  bool a_beta_hyp = false, a_beta_concl = false, b_beta_hyp = false, b_beta_concl = false;
  bool beta_violated = false;
};

/// S(i) = sup over [sigma^(i-2) rho, sigma^(i-1) rho] of r^-n F(r), exact from
/// the endpoints since log(r^-n F) is convex in log r. Throws InvalidParams
/// unless sigma > 1, 0 < beta <= 1/2 and rho > 0.
ThreeAnnulusReport three_annulus_check(const LaurentForm& form, int n, double sigma, double beta, double rho = 1.0);

/// True when 2 sigma^2 / (sigma^2 + 1) < sigma^(2 beta).
bool beta_admissible(double sigma, double beta);

/// Largest midpoint convexity defect of log F against log r over consecutive
/// radius triples (negative means strictly convex). Needs >= 3 radii.
double hadamard_convexity_check(const LaurentForm& form, const std::vector<double>& radii);

struct LaurentSweep {
  int count = 10000;
  int max_power = 6;  // coefficients a_n for |n| <= max_power; weights likewise
  double sigma = 2.0;
  double beta = 0.25;
  std::uint64_t seed = 7;
  int convexity_points = 64;
};

struct LaurentSweepResult {
  LaurentSweep params;
  long checks = 0;
  long violations = 0;       // strengthened forms
  long beta_violations = 0;  // beta forms (meaningful only if admissible)
  bool beta_admissible = false;
  double max_convexity_defect = 0.0;
  double max_monomial_defect = 0.0;  // |S(i)/S(2) - 1| for z^n at weight n
  bool monomials_ok = true;          // both implications hold for every monomial case
};

/// Random forms with standard complex Gaussian coefficients, every weight
/// |n| <= max_power checked at rho = 1, plus the monomial boundary cases.
LaurentSweepResult laurent_sweep(const LaurentSweep& params);
LaurentForm random_laurent_form(int max_power, std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------- fits

struct LojSample {
  std::string label;
  double log_delta = 0.0;
  double log_dist = 0.0;
  double lambda_max = 0.0;
};

/// Builds a sample; returns false (and leaves out unchanged) when dist or
/// delta is not strictly positive and finite.
bool make_loj_sample(const std::string& label, double delta, double dist, double lambda_max, LojSample& out);

struct LojFit {
  double alpha_hat = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used = 0;
  double decades = 0.0;
};

/// Least-squares slope of log_dist against log_delta. Throws
/// InsufficientSpread with fewer than 8 samples or less than 2 decades in delta.
LojFit fit_loj_exponent(const std::vector<LojSample>& samples);

/// Samples from the trace rows (dist > 0 only).
std::vector<LojSample> loj_samples_from_trace(const FlowTrace& trace, const std::string& label);

/// Samples from u displaced along a seeded random tangent field at
/// amplitudes 10^(-k/2), k = 1..levels.
std::vector<LojSample> loj_samples_from_perturbations(const MapField& harmonic, std::uint64_t seed, int levels = 8,
                                                      const std::string& label = "perturbation");

struct DecayFit {
  double alpha = 0.0;
  double c = 0.0;
  double relative_residual = 0.0;  // rms of predicted / observed - 1
  std::vector<std::pair<double, double>> predicted;  // (t, dist)
};

/// dist(t) ~ (c + ((2 - alpha) / alpha) t)^(alpha / (alpha - 2)) fitted in
/// log space over rows with t in [t_lo, t_hi] and dist > 0. Throws
/// InvalidParams unless 0 < alpha < 2 and WindowEmpty with fewer than 2 rows.
DecayFit fit_decay_rate(const FlowTrace& trace, double alpha, double t_lo = 0.0,
                        double t_hi = std::numeric_limits<double>::infinity());
DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& t_dist, double alpha);

}  // namespace hmflow
