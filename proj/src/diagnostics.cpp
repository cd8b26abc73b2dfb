#include "hmflow/diagnostics.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hmflow/errors.hpp"
#include "hmflow/parallel.hpp"
#include "quadrature.hpp"

namespace hmflow {

using detail::ci;
using detail::kCharts;

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

LatticeDistance dist_to_4pi_lattice(double E) {
  if (!(E >= 0.0) || !std::isfinite(E)) throw Error(ErrorKind::InvalidArgument, "energy must be finite and >= 0");
  LatticeDistance r;
  // round half down
  r.n = static_cast<long>(std::ceil(E / kFourPi - 0.5));
  r.dist = std::abs(E - kFourPi * static_cast<double>(r.n));
  return r;
}

// ---------------------------------------------------------------- scales

RadialEnergy::RadialEnergy(const DensityField& dens, const SpherePoint& center_in, EnergyKind kind) {
  const auto& g = *dens.geometry;
  const SpherePoint center = center_in.normalized();
  const double h2 = g.h * g.h;
  const std::size_t count = g.weight.size();
  std::vector<std::pair<double, double>> nodes(2 * count, {0.0, 0.0});
  for (ChartId chart : kCharts) {
    const auto& pts = g.points(chart);
    const auto& d = dens.of(kind, chart);
    const std::size_t off = ci(chart) * count;
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (std::size_t k = 0; k < count; ++k) {
      const double w = g.weight[k];
      if (w == 0.0) {
        nodes[off + k] = {std::numeric_limits<double>::infinity(), 0.0};
        continue;
      }
      nodes[off + k] = {geodesic_distance(center, pts[k]), w * d[k] * g.sigma[k] * g.sigma[k] * h2};
    }
  }
  std::stable_sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  while (!nodes.empty() && std::isinf(nodes.back().first)) nodes.pop_back();
  theta_.resize(nodes.size());
  cumulative_.assign(nodes.size() + 1, 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    theta_[i] = nodes[i].first;
    cumulative_[i + 1] = cumulative_[i] + nodes[i].second;
  }
}

double RadialEnergy::between(double inner, double outer) const {
  // Same closed-boundary slack as region_contains.
  const double lo = stereo_to_geodesic_radius(inner * (1.0 - 1e-12));
  const double hi = stereo_to_geodesic_radius(outer * (1.0 + 1e-12));
  const auto a = std::lower_bound(theta_.begin(), theta_.end(), lo) - theta_.begin();
  const auto b = std::upper_bound(theta_.begin(), theta_.end(), hi) - theta_.begin();
  if (b <= a) return 0.0;
  return cumulative_[b] - cumulative_[a];
}

ScaleDetection outer_energy_scale(const DensityField& dens, const SpherePoint& center, double epsilon, double R) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (!(R > 0.0 && R <= 1.0)) throw Error(ErrorKind::InvalidArgument, "R must lie in (0, 1]");
  const double h = dens.geometry->h;
  ScaleDetection out;
  out.center = center.normalized();
  out.epsilon = epsilon;
  out.R = R;

  const RadialEnergy radial(dens, out.center);
  const double floor = 4.0 * h;
  double prev = R;
  bool found = false;
  double lo = 0.0;
  double hi = 0.0;
  for (double rho = R; rho >= floor * (1.0 - 1e-12); rho /= kProfileRatio) {
    if (radial.half_annulus(rho) >= epsilon) {
      found = true;
      lo = rho;
      hi = prev;
      break;
    }
    prev = rho;
  }
  if (!found) return out;
  if (lo == R) {
    out.lambda = R;
  } else {
    while (hi / lo > 1.05) {
      const double mid = std::sqrt(lo * hi);
      if (radial.half_annulus(mid) >= epsilon) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.lambda = lo;
  }
  out.resolution_floor = out.lambda < 8.0 * h;
  return out;
}

ScaleDetection outer_energy_scale(const MapField& field, const SpherePoint& center, double epsilon, double R) {
  return outer_energy_scale(energy_density(field), center, epsilon, R);
}

std::vector<ScaleDetection> detect_bubbles(const MapField& field, double epsilon, const BubbleSearch& opts) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (!(opts.candidate_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "candidate radius must be positive");
  const DensityField dens = energy_density(field);
  const auto& g = *dens.geometry;
  const int n = g.n;
  const double rc2 = opts.candidate_radius * opts.candidate_radius;
  const double threshold = epsilon / (kFourPi * rc2 / (1.0 + rc2));

  struct Candidate {
    double e;
    ChartId chart;
    int k;
  };
  std::vector<Candidate> cands;
  for (ChartId chart : kCharts) {
    const auto& e = dens.e[ci(chart)];
    for (int j = 3; j < n - 3; ++j) {
      for (int i = 3; i < n - 3; ++i) {
        const int k = g.index(i, j);
        const double w = g.weight[k];
        // each point belongs to exactly one chart
        if (w < 0.5 || (w == 0.5 && chart == ChartId::South)) continue;
        if (e[k] < threshold) continue;
        bool peak = true;
        for (int dj = -1; dj <= 1 && peak; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            if ((di || dj) && e[g.index(i + di, j + dj)] > e[k]) {
              peak = false;
              break;
            }
          }
        }
        if (peak) cands.push_back({e[k], chart, k});
      }
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.e > b.e; });

  std::vector<ScaleDetection> found;
  int evaluated = 0;
  for (const auto& c : cands) {
    if (evaluated >= opts.max_candidates) break;
    const SpherePoint p = g.points(c.chart)[c.k];
    bool suppressed = false;
    for (const auto& d : found) {
      if (geodesic_distance(d.center, p) <= stereo_to_geodesic_radius(4.0 * d.lambda)) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;
    ++evaluated;
    ScaleDetection s = outer_energy_scale(dens, p, epsilon, opts.R);
    if (s.lambda > 0.0) found.push_back(s);
  }
  return found;
}

// ---------------------------------------------------------------- profiles

namespace {

std::vector<double> geometric_radii(double r_min, double r_max, double ratio) {
  if (!(r_min > 0.0 && r_max >= r_min)) throw Error(ErrorKind::InvalidArgument, "profile needs 0 < r_min <= r_max");
  if (!(ratio > 1.0)) throw Error(ErrorKind::InvalidArgument, "profile ratio must exceed 1");
  std::vector<double> r;
  for (int k = 0;; ++k) {
    const double v = r_min * std::pow(ratio, k);
    if (v > r_max * (1.0 + 1e-12)) break;
    r.push_back(v);
  }
  // close the grid at r_max so every sub-range of [r_min, r_max] is covered
  if (r.back() < r_max * (1.0 - 1e-12)) r.push_back(r_max);
  return r;
}

}  // namespace

AnnulusProfile annulus_profile(const DensityField& dens, const SpherePoint& center, int n, double r_min, double r_max,
                               double delta, double xi, double ratio) {
  if (!(xi > 0.0)) throw Error(ErrorKind::InvalidArgument, "xi must be positive");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  AnnulusProfile p;
  p.center = center.normalized();
  p.n = n;
  p.radii = geometric_radii(r_min, r_max, ratio);
  p.floor = delta / xi;
  p.values.reserve(p.radii.size());
  for (double r : p.radii) {
    const double avg = circle_average(dens, p.center, r, EnergyKind::Holomorphic);
    p.values.push_back(std::max(std::sqrt(std::max(avg, 0.0)), p.floor));
  }
  return p;
}

AnnulusProfile annulus_profile(const LaurentForm& form, int n, double r_min, double r_max, double ratio) {
  form.validate();
  AnnulusProfile p;
  p.n = n;
  p.radii = geometric_radii(r_min, r_max, ratio);
  for (double r : p.radii) p.values.push_back(laurent_F(form, r));
  return p;
}

double annulus_sup(const AnnulusProfile& profile, double r_lo, double r_hi, const SupWeight& weight) {
  if (profile.radii.empty() || profile.radii.size() != profile.values.size()) {
    throw Error(ErrorKind::RangeError, "empty or inconsistent profile");
  }
  const double tol = 1e-12;
  if (!(r_lo <= r_hi) || r_lo < profile.radii.front() * (1 - tol) || r_hi > profile.radii.back() * (1 + tol)) {
    throw Error(ErrorKind::RangeError, "sup range outside the profile");
  }
  double best = -1.0;
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    const double r = profile.radii[i];
    if (r < r_lo * (1 - tol) || r > r_hi * (1 + tol)) continue;
    double w = 1.0;
    switch (weight.mode) {
      case SupWeight::Mode::Power:
        w = std::pow(r, -profile.n);
        break;
      case SupWeight::Mode::InnerRatio:
        w = std::pow(r / weight.scale, weight.exponent);
        break;
      case SupWeight::Mode::OuterRatio:
        w = std::pow(weight.scale / r, weight.exponent);
        break;
    }
    best = std::max(best, w * profile.values[i]);
  }
  if (best < 0.0) throw Error(ErrorKind::RangeError, "no profile radius inside the sup range");
  return best;
}

// ---------------------------------------------------------------- Laurent oracle

bool beta_admissible(double sigma, double beta) {
  return 2.0 * sigma * sigma / (sigma * sigma + 1.0) < std::pow(sigma, 2.0 * beta);
}

ThreeAnnulusReport three_annulus_check(const LaurentForm& form, int n, double sigma, double beta, double rho) {
  if (!(sigma > 1.0)) throw Error(ErrorKind::InvalidParams, "sigma must exceed 1");
  if (!(beta > 0.0 && beta <= 0.5)) throw Error(ErrorKind::InvalidParams, "beta must lie in (0, 1/2]");
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidParams, "rho must be positive");
  form.validate();
  auto weighted = [&](double r) { return std::pow(r, -n) * laurent_F(form, r); };
  auto band = [&](int i) {
    const double a = std::pow(sigma, i - 2) * rho;
    const double b = std::pow(sigma, i - 1) * rho;
    return std::max(weighted(a), weighted(b));
  };
  ThreeAnnulusReport r;
  r.S1 = band(1);
  r.S2 = band(2);
  r.S3 = band(3);

  const double k = 1.0 + (sigma - 1.0) * (sigma - 1.0) / (2.0 * sigma);
  const double hyp = std::sqrt(sigma * k);
  const double concl = std::sqrt(sigma / k);
  r.a_hyp = r.S1 <= hyp * r.S2;
  r.a_concl = r.S2 <= concl * r.S3;
  r.b_hyp = r.S3 <= hyp * r.S2;
  r.b_concl = r.S2 <= concl * r.S1;
  r.violated = (r.a_hyp && !r.a_concl) || (r.b_hyp && !r.b_concl);

  r.beta_admissible = beta_admissible(sigma, beta);
  const double bh = std::pow(sigma, 1.0 - beta);
  const double bc = std::pow(sigma, beta);
  r.a_beta_hyp = r.S1 <= bh * r.S2;
  r.a_beta_concl = r.S2 < bc * r.S3;
  r.b_beta_hyp = r.S3 <= bh * r.S2;
  r.b_beta_concl = r.S2 < bc * r.S1;
  r.beta_violated = (r.a_beta_hyp && !r.a_beta_concl) || (r.b_beta_hyp && !r.b_beta_concl);
  return r;
}

double hadamard_convexity_check(const LaurentForm& form, const std::vector<double>& radii) {
  if (radii.size() < 3) throw Error(ErrorKind::InvalidArgument, "convexity check needs at least 3 radii");
  std::vector<double> x(radii.size());
  std::vector<double> y(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    x[i] = std::log(radii[i]);
    y[i] = std::log(laurent_F(form, radii[i]));
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < radii.size(); ++i) {
    const double s = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
    const double chord = (1 - s) * y[i - 1] + s * y[i + 1];
    worst = std::max(worst, y[i] - chord);
  }
  return worst;
}

LaurentForm random_laurent_form(int max_power, std::uint64_t seed, std::uint64_t index) {
  if (max_power < 0) throw Error(ErrorKind::InvalidArgument, "max_power must be >= 0");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  LaurentForm f;
  f.n_min = -max_power;
  f.coefficients.resize(2 * static_cast<std::size_t>(max_power) + 1);
  for (auto& a : f.coefficients) {
    const double re = normal(rng);
    const double im = normal(rng);
    a = Complex(re, im);
  }
  return f;
}

LaurentSweepResult laurent_sweep(const LaurentSweep& p) {
  if (p.count < 0) throw Error(ErrorKind::InvalidParams, "count must be >= 0");
  if (p.convexity_points < 3) throw Error(ErrorKind::InvalidParams, "convexity grid needs >= 3 points");
  LaurentSweepResult out;
  out.params = p;
  out.beta_admissible = beta_admissible(p.sigma, p.beta);

  // The union of the three bands at rho = 1.
  std::vector<double> radii(p.convexity_points);
  const double a = std::log(1.0 / p.sigma);
  const double b = std::log(p.sigma * p.sigma);
  for (int i = 0; i < p.convexity_points; ++i) radii[i] = std::exp(a + (b - a) * i / (p.convexity_points - 1));

  struct Partial {
    long checks = 0, violations = 0, beta_violations = 0;
    double convexity = -std::numeric_limits<double>::infinity();
  };
  std::vector<Partial> parts(static_cast<std::size_t>(p.count));
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
  for (int i = 0; i < p.count; ++i) {
    const LaurentForm f = random_laurent_form(p.max_power, p.seed, static_cast<std::uint64_t>(i));
    Partial& q = parts[i];
    for (int n = -p.max_power; n <= p.max_power; ++n) {
      const auto r = three_annulus_check(f, n, p.sigma, p.beta);
      ++q.checks;
      q.violations += r.violated;
      q.beta_violations += r.beta_violated;
    }
    q.convexity = hadamard_convexity_check(f, radii);
  }
  out.max_convexity_defect = -std::numeric_limits<double>::infinity();
  for (const auto& q : parts) {
    out.checks += q.checks;
    out.violations += q.violations;
    out.beta_violations += q.beta_violations;
    out.max_convexity_defect = std::max(out.max_convexity_defect, q.convexity);
  }

  for (int n = -p.max_power; n <= p.max_power; ++n) {
    const auto r = three_annulus_check(LaurentForm::monomial(n), n, p.sigma, p.beta);
    out.max_monomial_defect =
        std::max({out.max_monomial_defect, std::abs(r.S1 / r.S2 - 1.0), std::abs(r.S3 / r.S2 - 1.0)});
    out.monomials_ok = out.monomials_ok && !r.violated && r.a_hyp && r.a_concl && r.b_hyp && r.b_concl;
    out.max_convexity_defect =
        std::max(out.max_convexity_defect, hadamard_convexity_check(LaurentForm::monomial(n), radii));
  }
  return out;
}

// ---------------------------------------------------------------- fits

bool make_loj_sample(const std::string& label, double delta, double dist, double lambda_max, LojSample& out) {
  if (!(delta > 0.0) || !(dist > 0.0) || !std::isfinite(delta) || !std::isfinite(dist)) return false;
  out.label = label;
  out.log_delta = std::log(delta);
  out.log_dist = std::log(dist);
  out.lambda_max = lambda_max;
  return true;
}

LojFit fit_loj_exponent(const std::vector<LojSample>& samples) {
  std::vector<const LojSample*> ok;
  for (const auto& s : samples) {
    if (std::isfinite(s.log_delta) && std::isfinite(s.log_dist)) ok.push_back(&s);
  }
  if (ok.size() < 8) throw Error(ErrorKind::InsufficientSpread, "need at least 8 finite samples");
  double lo = ok.front()->log_delta;
  double hi = lo;
  for (const auto* s : ok) {
    lo = std::min(lo, s->log_delta);
    hi = std::max(hi, s->log_delta);
  }
  const double decades = (hi - lo) / std::numbers::ln10;
  if (decades < 2.0) throw Error(ErrorKind::InsufficientSpread, "samples span fewer than 2 decades in delta");

  const double m = static_cast<double>(ok.size());
  double mx = 0.0, my = 0.0;
  for (const auto* s : ok) {
    mx += s->log_delta;
    my += s->log_dist;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto* s : ok) {
    const double dx = s->log_delta - mx;
    const double dy = s->log_dist - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LojFit f;
  f.alpha_hat = sxy / sxx;
  f.intercept = my - f.alpha_hat * mx;
  double ssr = 0.0;
  for (const auto* s : ok) {
    const double r = s->log_dist - (f.intercept + f.alpha_hat * s->log_delta);
    ssr += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.used = static_cast<int>(ok.size());
  f.decades = decades;
  return f;
}

std::vector<LojSample> loj_samples_from_trace(const FlowTrace& trace, const std::string& label) {
  std::vector<LojSample> out;
  for (const auto& r : trace.rows) {
    LojSample s;
    if (make_loj_sample(label + "@t=" + std::to_string(r.t), r.delta, r.dist4pi, 0.0, s)) out.push_back(s);
  }
  return out;
}

std::vector<LojSample> loj_samples_from_perturbations(const MapField& harmonic, std::uint64_t seed, int levels,
                                                      const std::string& label) {
  const TangentField v = random_tangent_field(harmonic, seed);
  std::vector<LojSample> out;
  for (int k = 1; k <= levels; ++k) {
    const double amp = std::pow(10.0, -0.5 * k);
    const MapField f = displace(harmonic, v, amp);
    const double delta = tension_l2(compute_tension(f));
    const double dist = dist_to_4pi_lattice(energy_report(f).E).dist;
    LojSample s;
    if (make_loj_sample(label + "@a=" + std::to_string(amp), delta, dist, 0.0, s)) out.push_back(s);
  }
  return out;
}

DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& pts, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error(ErrorKind::InvalidParams, "decay fit needs 0 < alpha < 2");
  std::vector<std::pair<double, double>> use;
  for (const auto& [t, d] : pts) {
    if (d > 0.0 && std::isfinite(d) && std::isfinite(t)) use.emplace_back(t, d);
  }
  if (use.size() < 2) throw Error(ErrorKind::WindowEmpty, "fewer than 2 rows with dist > 0 in the window");

  const double p = alpha / (alpha - 2.0);
  const double kappa = (2.0 - alpha) / alpha;
  double tmin = use.front().first;
  for (const auto& u : use) tmin = std::min(tmin, u.first);

  // dist^(1/p) = c + kappa t is linear; its mean offset starts the search.
  double c0 = 0.0;
  for (const auto& [t, d] : use) c0 += std::pow(d, 1.0 / p) - kappa * t;
  c0 /= static_cast<double>(use.size());
  const double c_floor = -kappa * tmin;
  if (c0 <= c_floor) c0 = c_floor + 1e-6 * (1.0 + std::abs(c_floor));

  auto sse = [&](double c) {
    double s = 0.0;
    for (const auto& [t, d] : use) {
      const double r = std::log(d) - p * std::log(c + kappa * t);
      s += r * r;
    }
    return s;
  };
  // Search the offset above the pole c = -kappa tmin in log coordinates.
  const double base = c0 - c_floor;
  auto objective = [&](double s) { return sse(c_floor + base * std::exp(s)); };
  const auto [s_best, _] = boost::math::tools::brent_find_minima(objective, -12.0, 12.0, 52);
  double c = c_floor + base * std::exp(s_best);
  // Gauss-Newton polish to full precision.
  for (int it = 0; it < 20; ++it) {
    double num = 0.0, den = 0.0;
    for (const auto& [t, d] : use) {
      const double x = c + kappa * t;
      const double r = std::log(d) - p * std::log(x);
      const double j = -p / x;
      num += j * r;
      den += j * j;
    }
    const double step = -num / den;
    if (!(c + step > c_floor)) break;
    c += step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(c))) break;
  }

  DecayFit fit;
  fit.alpha = alpha;
  fit.c = c;
  double acc = 0.0;
  for (const auto& [t, d] : use) {
    const double pred = std::pow(c + kappa * t, p);
    fit.predicted.emplace_back(t, pred);
    acc += (pred / d - 1.0) * (pred / d - 1.0);
  }
  fit.relative_residual = std::sqrt(acc / static_cast<double>(use.size()));
  return fit;
}

DecayFit fit_decay_rate(const FlowTrace& trace, double alpha, double t_lo, double t_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : trace.rows) {
    if (r.t >= t_lo && r.t <= t_hi) pts.emplace_back(r.t, r.dist4pi);
  }
  return fit_decay_rate(pts, alpha);
}

}  // namespace hmflow
