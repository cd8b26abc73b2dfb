// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Supporting tables are written to the directory given as argv[1]
// (default ./acceptance_out).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hmflow/diagnostics.hpp"
#include "hmflow/energetics.hpp"
#include "hmflow/errors.hpp"
#include "hmflow/flow.hpp"
#include "hmflow/parallel.hpp"
#include "hmflow/reports.hpp"
#include "hmflow/snapshot.hpp"
#include "hmflow/spec_io.hpp"

using namespace hmflow;
namespace fs = std::filesystem;

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// ---- tolerances
constexpr double kQuantRelTol = 0.005;          // #1
constexpr double kQuantSeconds = 30.0;          // #1
constexpr double kDegreeTol = 1e-2;             // #2
constexpr double kMinOrder = 1.5;               // #3
constexpr double kGradientDefect = 1e-3;        // #4
constexpr double kGradientStep = 1e-5;          // #4
constexpr int kGradientDirections = 20;         // #4
constexpr double kLojMinSlope = 0.9;            // #5
constexpr double kLojMinR2 = 0.95;              // #5
constexpr double kFloorMultiple = 10.0;         // #5: samples need dist > this * discrete floor
constexpr double kIdentityRelTol = 1e-3;        // #6
constexpr double kScaleFactor = 2.0;            // #7
constexpr double kScaleEpsilon = 3.9;           // #7
constexpr double kLaurentMonomialTol = 1e-12;   // #8
constexpr double kLaurentConvexityTol = 1e-10;  // #8
constexpr double kLaurentSeconds = 10.0;        // #8
constexpr double kRepulsionHolomorphic = 1e-6;  // #9
constexpr double kRepulsionQ = 1.5;             // #9
constexpr double kConformalRelTol = 0.005;      // #10

int failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] #%d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string f(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MapField sampled(const RationalMapSpec& s, int n) { return sample_field(make_source(s), n); }

RationalMapSpec inverse_conjugate() { return {{1.0}, {0.0, 1.0}, Orientation::Antiholomorphic}; }

struct Named {
  std::string name;
  RationalMapSpec spec;
};

std::vector<Named> quantization_maps() {
  return {
      {"z", RationalMapSpec::identity()},
      {"z^2", RationalMapSpec::monomial(2)},
      {"conj(z)", RationalMapSpec::conjugation()},
      {"(z^2-1)/z", {{-1.0, 0.0, 1.0}, {0.0, 1.0}, Orientation::Holomorphic}},
  };
}

// ------------------------------------------------------------------ #1, #2

void quantization_and_degree(const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<EnergyReport> reps;
  for (const auto& m : quantization_maps()) reps.push_back(energy_report(sampled(m.spec, 513)));
  const double secs = seconds_since(t0);
  write_file_atomic(out / "quantization.csv", energy_csv(reps));

  const auto maps = quantization_maps();
  bool ok1 = secs <= kQuantSeconds;
  bool ok2 = true;
  double worst1 = 0.0, worst2 = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const int deg = maps[i].spec.signed_degree();
    const double target = kFourPi * std::abs(deg);
    const double rel = std::abs(reps[i].E - target) / target;
    worst1 = std::max(worst1, rel);
    ok1 = ok1 && rel <= kQuantRelTol;
    const double gap = std::abs(reps[i].degree_pullback - reps[i].degree_energy);
    worst2 = std::max(worst2, gap);
    ok2 = ok2 && gap <= kDegreeTol && round_degree(reps[i].degree_pullback) == round_degree(reps[i].degree_energy) &&
          round_degree(reps[i].degree_pullback) == deg;
  }
  report(1, ok1, "energy quantization",
         "N=513, max |E-4pi|deg||/(4pi|deg|) = " + f("%.3e", worst1) + " (tol " + f("%.3g", kQuantRelTol) +
             "), " + f("%.1f", secs) + " s (limit " + f("%.0f", kQuantSeconds) + " s)");
  report(2, ok2, "degree consistency",
         "max |deg_pullback - kappa/4pi| = " + f("%.3e", worst2) + " (tol " + f("%.0e", kDegreeTol) +
             "), rounded degrees agree with the specs");
}

// ------------------------------------------------------------------ #3

void harmonicity(const fs::path& out) {
  std::vector<int> ns = {129, 257, 513};
  std::vector<double> deltas;
  std::string csv = "n,delta\n";
  for (int n : ns) {
    deltas.push_back(tension_l2(compute_tension(sync_overlap(sampled(RationalMapSpec::identity(), n)))));
    csv += std::to_string(n) + "," + fmt(deltas.back()) + "\n";
  }
  write_file_atomic(out / "harmonicity.csv", csv);
  bool ok = true;
  double min_order = 1e300;
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    ok = ok && deltas[i] < deltas[i - 1];
    const double order = std::log(deltas[i - 1] / deltas[i]) / std::log(2.0);
    min_order = std::min(min_order, order);
  }
  ok = ok && min_order >= kMinOrder;
  report(3, ok, "harmonicity",
         "||T|| = " + f("%.3e", deltas[0]) + ", " + f("%.3e", deltas[1]) + ", " + f("%.3e", deltas[2]) +
             "; min empirical order " + f("%.2f", min_order) + " (need >= " + f("%.1f", kMinOrder) + ")");
}

// ------------------------------------------------------------------ #4

void gradient_consistency(const fs::path& out) {
  // A non-harmonic base: the identity pushed by a seeded smooth perturbation.
  const auto base = sync_overlap(perturb(sampled(RationalMapSpec::identity(), 129), 0.1, 1));
  const auto t = compute_tension(base);
  const double tn = tension_l2(t);
  const auto& g = base.geometry();
  double worst = 0.0;
  std::string csv = "seed,inner,dEds,defect\n";
  for (int d = 0; d < kGradientDirections; ++d) {
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(d);
    const auto v = random_tangent_field(base, seed);
    std::vector<double> parts;
    for (ChartId c : {ChartId::North, ChartId::South}) {
      for (std::size_t k = 0; k < g.weight.size(); ++k) {
        parts.push_back(g.weight[k] * v.chart(c)[k].squaredNorm() * g.sigma[k] * g.sigma[k] * g.h * g.h);
      }
    }
    const double vn = std::sqrt(par::ordered_sum(parts));
    const double ep = energy_report(displace(base, v, kGradientStep)).E;
    const double em = energy_report(displace(base, v, -kGradientStep)).E;
    const double dEds = (ep - em) / (2 * kGradientStep);
    const double inner = tension_inner(t, v);
    const double defect = std::abs(inner + dEds) / (tn * vn);
    worst = std::max(worst, defect);
    csv += std::to_string(seed) + "," + fmt(inner) + "," + fmt(dEds) + "," + fmt(defect) + "\n";
  }
  write_file_atomic(out / "gradient.csv", csv);
  report(4, worst <= kGradientDefect, "gradient consistency",
         std::to_string(kGradientDirections) + " directions at N=129, step " + f("%.0e", kGradientStep) +
             ": max |<T,v> + dE/ds| / (||T|| ||v||) = " + f("%.3e", worst) + " (tol " + f("%.0e", kGradientDefect) +
             ")");
}

// ------------------------------------------------------------------ #5, #6

void lojasiewicz_and_energy_identity(const fs::path& out) {
  const int n = 129;
  const auto initial = sync_overlap(perturb(sampled(RationalMapSpec::identity(), n), 0.1, 1));
  FlowConfig cfg;
  cfg.cfl = 0.5;
  cfg.t_max = 5.0;
  cfg.record_every = 5;
  // Below this the flow is at the discrete harmonic map to within its own
  // truncation error; further steps only add samples under the floor.
  cfg.tension_stop = 1e-6;
  const auto t0 = std::chrono::steady_clock::now();
  const auto trace = run(initial, cfg);
  const double secs = seconds_since(t0);
  write_file_atomic(out / "trace-loj.csv", trace_csv(trace));

  // Energy floor of the discretization: how far the sampled harmonic map
  // sits from 4 pi at this resolution.
  const double floor =
      dist_to_4pi_lattice(energy_report(sync_overlap(sampled(RationalMapSpec::identity(), n))).E).dist;
  std::vector<LojSample> kept;
  for (const auto& s : loj_samples_from_trace(trace, "flow")) {
    if (std::exp(s.log_dist) > kFloorMultiple * floor) kept.push_back(s);
  }
  write_file_atomic(out / "loj-flow.csv", loj_csv(kept));

  const auto& first = trace.rows.front();
  const auto& last = trace.rows.back();
  const bool decays = last.delta < 1e-2 * first.delta && last.dist4pi < 1e-2 * first.dist4pi;
  bool monotone = true;
  for (std::size_t k = 1; k < trace.rows.size(); ++k) monotone = monotone && trace.rows[k].E <= trace.rows[k - 1].E + 1e-10;
  LojFit fit;
  bool fitted = true;
  try {
    fit = fit_loj_exponent(kept);
  } catch (const Error&) {
    fitted = false;
  }
  std::vector<std::pair<double, double>> xy;
  for (const auto& s : kept) xy.emplace_back(std::exp(s.log_delta), std::exp(s.log_dist));
  write_file_atomic(out / "loj-flow.svg", svg_loglog(xy, "flow from perturbed identity", "delta", "dist",
                                                     fitted ? &fit : nullptr));
  const bool ok5 = decays && monotone && fitted && fit.alpha_hat >= kLojMinSlope && fit.r2 >= kLojMinR2;
  report(5, ok5, "Lojasiewicz scatter",
         "N=129, t in [0, " + f("%.3f", last.t) + "] (" + to_string(trace.status) + ", " + f("%.0f", secs) +
             " s); delta " + f("%.2e", first.delta) + " -> " + f("%.2e", last.delta) + ", dist " +
             f("%.2e", first.dist4pi) + " -> " + f("%.2e", last.dist4pi) + "; slope " +
             f("%.3f", fit.alpha_hat) + ", r2 " + f("%.4f", fit.r2) + " over " + std::to_string(fit.used) +
             " samples, " + f("%.1f", fit.decades) + " decades (dist > " + f("%.0f", kFloorMultiple) + " x floor " +
             f("%.1e", floor) + ")");

  const double delta0 = first.dist4pi;
  const double res = energy_identity_residual(trace, first.t, last.t);
  report(6, res <= kIdentityRelTol * delta0, "energy identity",
         "|Delta(t2) - Delta(0) + int delta^2| = " + f("%.3e", res) + " vs " + f("%.0e", kIdentityRelTol) +
             " * Delta(0) = " + f("%.3e", kIdentityRelTol * delta0));
}

// ------------------------------------------------------------------ #7

// Brute force: energy of {rho/2 <= r <= rho} about the North pole by a
// direct sweep over all quadrature nodes.
double brute_half_annulus(const DensityField& d, double rho) {
  const auto& g = *d.geometry;
  const Vec3 c(0, 0, 1);
  std::vector<double> parts;
  for (ChartId ch : {ChartId::North, ChartId::South}) {
    const auto& e = d.of(EnergyKind::Total, ch);
    const auto& pts = g.points(ch);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (g.weight[k] == 0.0) continue;
      const double r = std::tan(0.5 * geodesic_distance(c, pts[k]));
      if (r >= 0.5 * rho * (1 - 1e-12) && r <= rho * (1 + 1e-12)) {
        parts.push_back(g.weight[k] * e[k] * g.sigma[k] * g.sigma[k] * g.h * g.h);
      }
    }
  }
  return par::ordered_sum(parts);
}

void outer_scale(const fs::path& out) {
  bool ok = true;
  std::string detail;
  std::string csv = "lambda_true,epsilon,lambda_detected,ratio,table_lo,table_hi,resolution_floor\n";
  std::string info;
  for (double lambda : {0.02, 0.05, 0.1}) {
    BubbleSpec g;
    g.body = RationalMapSpec::constant(0.0);
    g.bubbles.push_back({0.0, lambda, inverse_conjugate()});
    const auto d = energy_density(sample_field(make_source(g), 513));
    const auto s = outer_energy_scale(d, Vec3(0, 0, 1), kScaleEpsilon, 1.0);
    // Table on the scan grid rho_k = 2^(-k/8): the detection must lie in the
    // bracket [largest rho_k with energy >= epsilon, the next grid value up].
    double lo = 0.0, hi = 0.0;
    for (int k = 0;; ++k) {
      const double rho = std::pow(2.0, -k / 8.0);
      if (rho < 4.0 * d.geometry->h) break;
      if (brute_half_annulus(d, rho) >= kScaleEpsilon) {
        lo = rho;
        hi = std::pow(2.0, -(k - 1) / 8.0);
        break;
      }
    }
    const double ratio = s.lambda / lambda;
    const bool in_bracket = lo > 0.0 && s.lambda >= lo * (1 - 1e-12) && s.lambda <= hi * (1 + 1e-12);
    const bool within = ratio <= kScaleFactor && ratio >= 1.0 / kScaleFactor;
    ok = ok && in_bracket && within;
    detail += (detail.empty() ? "" : ", ") + std::string("lambda ") + f("%.2f", lambda) + " -> " +
              f("%.4f", s.lambda) + " (x" + f("%.2f", ratio) + (s.resolution_floor ? ", below 8h" : "") +
              (in_bracket ? "" : ", OUTSIDE table bracket") + ")";
    csv += fmt(lambda) + "," + fmt(kScaleEpsilon) + "," + fmt(s.lambda) + "," + fmt(ratio) + "," + fmt(lo) + "," +
           fmt(hi) + "," + (s.resolution_floor ? "1" : "0") + "\n";
    const auto low = outer_energy_scale(d, Vec3(0, 0, 1), 0.3, 1.0);
    csv += fmt(lambda) + ",0.3," + fmt(low.lambda) + "," + fmt(low.lambda / lambda) + ",,," +
           (low.resolution_floor ? "1" : "0") + "\n";
    info += (info.empty() ? "" : ", ") + f("x%.1f", low.lambda / lambda);
  }
  write_file_atomic(out / "outer_scale.csv", csv);
  report(7, ok, "outer energy scale",
         "N=513, epsilon " + f("%.1f", kScaleEpsilon) + ": " + detail + "; all within the brute-force table bracket");
  std::printf("       note: at epsilon 0.3 the same bubbles give %s (outer_scale.csv)\n", info.c_str());
}

// ------------------------------------------------------------------ #8

void laurent_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  LaurentSweep p;  // 10^4 forms, |n| <= 6, sigma 2, beta 0.25, seed 7
  const auto r = laurent_sweep(p);
  const double secs = seconds_since(t0);
  const bool ok = r.violations == 0 && r.monomials_ok && r.max_monomial_defect <= kLaurentMonomialTol &&
                  r.max_convexity_defect <= kLaurentConvexityTol && secs <= kLaurentSeconds;
  report(8, ok, "three-annulus oracle",
         std::to_string(p.count) + " forms x " + std::to_string(2 * p.max_power + 1) + " weights, " +
             std::to_string(r.checks) + " checks: " + std::to_string(r.violations) +
             " violations, monomial defect " + f("%.1e", r.max_monomial_defect) + ", convexity defect " +
             f("%.1e", r.max_convexity_defect) + ", " + f("%.2f", secs) + " s; beta-form violations " +
             std::to_string(r.beta_violations) + " (beta " + f("%.2f", p.beta) +
             (r.beta_admissible ? " admissible)" : " outside the admissible range)"));
}

// ------------------------------------------------------------------ #9

void repulsion(const fs::path& out) {
  std::string csv = "lambda,repulsion,tension,ratio\n";
  bool ok = true;
  std::string ratios;
  for (double lambda : {0.02, 0.05, 0.1}) {
    BubbleSpec g;
    g.body = RationalMapSpec::identity();
    g.bubbles.push_back({0.0, lambda, inverse_conjugate()});
    const auto field = sample_field(make_source(g), 513);
    const double rep = repulsion_norm(energy_density(field), kRepulsionQ);
    const double ten = tension_l2(compute_tension(field));
    const double ratio = rep / ten;
    ok = ok && std::isfinite(ratio) && ratio > 0.0;
    csv += fmt(lambda) + "," + fmt(rep) + "," + fmt(ten) + "," + fmt(ratio) + "\n";
    ratios += (ratios.empty() ? "" : ", ") + f("%.3g", ratio);
  }
  double worst_hol = 0.0;
  for (const auto& m : quantization_maps()) {
    if (m.spec.orientation != Orientation::Holomorphic) continue;
    worst_hol = std::max(worst_hol, repulsion_norm(energy_density(sampled(m.spec, 257)), kRepulsionQ));
  }
  write_file_atomic(out / "repulsion.csv", csv);
  ok = ok && worst_hol <= kRepulsionHolomorphic;
  report(9, ok, "repulsion diagnostic",
         "q=1.5, ratios ||sqrt(e_d e_dbar)|| / ||T|| at lambda 0.02, 0.05, 0.1: " + ratios +
             "; holomorphic maps " + f("%.1e", worst_hol) + " (tol " + f("%.0e", kRepulsionHolomorphic) + ")");
}

// ------------------------------------------------------------------ #10

void conformal() {
  const double e0 = energy_report(sampled(RationalMapSpec::identity(), 257)).E;
  double worst = 0.0;
  for (Complex a : {Complex(0.5, 0.0), Complex(0.0, 0.5), Complex(-0.3, 0.4), Complex(0.25, -0.25),
                    Complex(-0.5, 0.0)}) {
    const RationalMapSpec m{{-a, 1.0}, {1.0, std::conj(a)}, Orientation::Holomorphic};
    worst = std::max(worst, std::abs(energy_report(sampled(m, 257)).E / e0 - 1.0));
  }
  report(10, worst <= kConformalRelTol, "conformal invariance",
         "N=257, |a| <= 0.5: max relative energy change " + f("%.3e", worst) + " (tol " +
             f("%.3g", kConformalRelTol) + ")");
}

// ------------------------------------------------------------------ #11

void determinism(const fs::path& out) {
  const auto field = perturb(sampled(RationalMapSpec::monomial(2), 129), 0.1, 3);
  const std::string bytes = encode_snapshot(field);
  write_snapshot(out / "roundtrip.sphm", field);
  const auto back = read_snapshot(out / "roundtrip.sphm");
  const bool round_trip = encode_snapshot(back) == bytes && read_text_file(out / "roundtrip.sphm") == bytes;

  FlowConfig cfg;
  cfg.cfl = 0.5;
  cfg.t_max = 0.01;
  cfg.record_every = 3;
  cfg.snapshot_every = 0.005;
  std::vector<std::string> csvs, snaps;
  for (int w : {1, 2, 8}) {
    par::set_worker_count(w);
    const auto tr = run(perturb(sampled(RationalMapSpec::identity(), 129), 0.1, 7), cfg);
    csvs.push_back(trace_csv(tr));
    std::string s;
    for (const auto& snap : tr.snapshots) s += encode_snapshot(snap.field);
    snaps.push_back(s);
  }
  par::set_worker_count(1);
  bool same = true;
  for (std::size_t i = 1; i < csvs.size(); ++i) same = same && csvs[i] == csvs[0] && snaps[i] == snaps[0];
  report(11, round_trip && same, "determinism and persistence",
         std::string("snapshot write-read-write ") + (round_trip ? "byte-identical" : "DIFFERS") +
             "; seeded flow traces and snapshots under 1, 2, 8 workers " + (same ? "byte-identical" : "DIFFER"));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  const std::vector<std::function<void()>> steps = {
      [&] { quantization_and_degree(out); },
      [&] { harmonicity(out); },
      [&] { gradient_consistency(out); },
      [&] { lojasiewicz_and_energy_identity(out); },
      [&] { outer_scale(out); },
      [&] { laurent_oracle(); },
      [&] { repulsion(out); },
      [&] { conformal(); },
      [&] { determinism(out); },
  };
  for (const auto& s : steps) {
    try {
      s();
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] error: %s\n", e.what());
    }
  }
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
