#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "hmflow/diagnostics.hpp"
#include "hmflow/energetics.hpp"
#include "hmflow/errors.hpp"
#include "hmflow/flow.hpp"
#include "hmflow/parallel.hpp"

using namespace hmflow;

namespace {

MapField identity(int n = 129) { return sync_overlap(sample_field(make_source(RationalMapSpec::identity()), n)); }

MapField perturbed(int n = 129, double a = 0.1) {
  return sync_overlap(perturb(sample_field(make_source(RationalMapSpec::identity()), n), a, 1));
}

double max_difference(const MapField& a, const MapField& b) {
  double m = 0.0;
  for (ChartId c : {ChartId::North, ChartId::South}) {
    for (std::size_t k = 0; k < a.grid(c).values.size(); ++k) {
      m = std::max(m, (a.grid(c).values[k] - b.grid(c).values[k]).norm());
    }
  }
  return m;
}

bool identical(const MapField& a, const MapField& b) {
  for (ChartId c : {ChartId::North, ChartId::South}) {
    if (a.grid(c).values != b.grid(c).values) return false;
  }
  return true;
}

bool identical(const TraceRow& a, const TraceRow& b) {
  return a.t == b.t && a.E == b.E && a.E_d == b.E_d && a.E_db == b.E_db && a.delta == b.delta &&
         a.dist4pi == b.dist4pi && a.max_density == b.max_density && a.dt == b.dt;
}

FlowConfig short_config() {
  FlowConfig c;
  c.cfl = 0.5;
  c.t_max = 0.02;
  c.record_every = 5;
  c.tension_stop = 1e-6;
  return c;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("config validation") {
  FlowConfig c;
  CHECK_NOTHROW(c.validate());
  c.cfl = 0.6;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FlowConfig{};
  c.tension_stop = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FlowConfig{};
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(to_string(FlowStatus::TensionStop) == "tension_stop");
}

TEST_CASE("time step rule") {
  const auto& g = *grid_geometry(129, 1.2);
  const double smin = 2.0 / (1.0 + 2 * 1.44);
  CHECK(stable_dt(g, 0.2) == doctest::Approx(0.2 * g.h * g.h * smin * smin).epsilon(1e-14));
  const auto f = identity();
  CHECK_THROWS_AS(step(f, stable_dt(g, 0.5) * 1.01), Error);
  try {
    step(f, stable_dt(g, 0.5) * 1.01);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StepTooLarge);
  }
  CHECK_NOTHROW(step(f, stable_dt(g, 0.5)));
}

TEST_CASE("single steps") {
  const auto c = sample_field(make_source(RationalMapSpec::constant(Complex(1.0, -2.0))), 129);
  const double dt = stable_dt(c.geometry(), 0.2);
  CHECK(identical(step(c, dt), sync_overlap(c)));

  const auto id = identity();
  const double h = id.spacing();
  CHECK(max_difference(step(id, dt), id) <= dt * h * h);

  const auto p = perturbed();
  const auto q = step(p, dt);
  CHECK(q.max_norm_defect() < 1e-12);
  const double e0 = energy_report(p).E, e1 = energy_report(q).E;
  CHECK(e1 < e0);
  // Regression value of the first step (N=129, amplitude 0.1, seed 1, cfl 0.2).
  CHECK(e0 - e1 == doctest::Approx(dt * std::pow(tension_l2(compute_tension(p)), 2)).epsilon(0.02));

  MapField bad = p;
  bad.at(ChartId::North, 64, 64) = Vec3(std::numeric_limits<double>::quiet_NaN(), 0, 0);
  try {
    step(bad, dt);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
}

TEST_CASE("projected update agrees with the normalized one to second order") {
  const auto p = perturbed();
  const double dt = stable_dt(p.geometry(), 0.5);
  const double d1 = max_difference(step(p, dt), step_projected_unnormalized(p, dt));
  const double d2 = max_difference(step(p, dt / 2), step_projected_unnormalized(p, dt / 2));
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("harmonic initial data stops at once") {
  auto cfg = short_config();
  const auto tr = run(identity(), cfg);
  CHECK(tr.status == FlowStatus::TensionStop);
  CHECK(tr.rows.size() == 1);
  CHECK(tr.steps == 0);

  cfg.tension_stop = 1e-12;
  cfg.t_max = 0.0;
  const auto zero = run(perturbed(), cfg);
  CHECK(zero.rows.size() == 1);
  CHECK(zero.status == FlowStatus::ReachedTMax);
  CHECK(zero.snapshots.size() == 1);
}

TEST_CASE("perturbed identity: monotone energy, decaying tension, stable degree") {
  auto cfg = short_config();
  cfg.t_max = 0.05;
  cfg.snapshot_every = 0.01;
  const auto tr = run(perturbed(), cfg);
  CHECK(tr.status == FlowStatus::ReachedTMax);
  REQUIRE(tr.rows.size() > 10);
  for (std::size_t k = 1; k < tr.rows.size(); ++k) {
    CHECK(tr.rows[k].t > tr.rows[k - 1].t);
    CHECK(tr.rows[k].E <= tr.rows[k - 1].E + 1e-10);
    const auto ld = dist_to_4pi_lattice(tr.rows[k].E);
    CHECK(tr.rows[k].dist4pi == ld.dist);
  }
  CHECK(tr.rows.back().t == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(tr.rows.back().delta < tr.rows.front().delta);
  CHECK(tr.snapshots.size() >= 6);
  for (const auto& s : tr.snapshots) CHECK(round_degree(degree_from_pullback(s.field)) == 1);
  CHECK_THROWS_AS(tr.snapshot_at(0.0123456), Error);

  // Energy identity with dense rows.
  const double t2 = tr.rows.back().t;
  const double delta0 = tr.rows.front().dist4pi;
  CHECK(energy_identity_residual(tr, 0.0, t2) <= 1e-3 * delta0);
  CHECK(energy_identity_residual(tr, 0.01, 0.01) == 0.0);
  CHECK_THROWS_AS(energy_identity_residual(tr, 0.0, 1.0), Error);

  // Local identity: drift bounded by the cutoff term with a modest constant.
  const double ta = tr.snapshots[1].t, tb = tr.snapshots.back().t;
  const auto ld = local_energy_drift(tr, Region::disk(Vec3(0, 0, 1), 1.0), ta, tb);
  CHECK(ld.k == 2);
  CHECK(ld.cutoff_gradient_sup == doctest::Approx(15.0 / (8.0 * 8.0 * tr.snapshots[0].field.spacing())));
  CHECK(ld.drift > 0.0);
  CHECK(ld.drift <= ld.bound_rhs);
  const auto same = local_energy_drift(tr, Region::disk(Vec3(0, 0, 1), 1.0), ta, ta);
  CHECK(same.drift == 0.0);
  CHECK_THROWS_AS(local_energy_drift(tr, Region::disk(Vec3(0, 0, 1), 0.01), ta, tb), Error);
}

TEST_CASE("stationary trace has zero residual") {
  FlowTrace tr;
  for (int k = 0; k < 5; ++k) {
    TraceRow r;
    r.t = 0.1 * k;
    r.E = 4 * std::numbers::pi;
    tr.rows.push_back(r);
  }
  CHECK(energy_identity_residual(tr, 0.05, 0.35) <= 1e-12);
}

TEST_CASE("blow-up guard is a status, not an error") {
  auto cfg = short_config();
  cfg.energy_blowup_guard = 1e-6;
  const auto tr = run(perturbed(), cfg);
  CHECK(tr.status == FlowStatus::BlowupDetected);
  CHECK(tr.snapshots.size() >= 1);
}

TEST_CASE("resumed runs repeat the continuation bit for bit") {
  auto cfg = short_config();
  cfg.t_max = 0.02;
  cfg.snapshot_every = 0.01;
  const auto full = run(perturbed(), cfg);
  REQUIRE(full.snapshots.size() >= 2);
  const auto& mid = full.snapshots[1];
  auto cont = cfg;
  cont.t_start = mid.t;
  const auto rest = run(mid.field, cont);
  CHECK(identical(rest.snapshots.back().field, full.snapshots.back().field));
  CHECK(rest.snapshots.back().t == full.snapshots.back().t);
  // Rows after the resume point coincide.
  const auto& last_a = full.rows.back();
  const auto& last_b = rest.rows.back();
  CHECK(identical(last_a, last_b));
}

TEST_CASE("results do not depend on the worker count") {
  auto cfg = short_config();
  cfg.t_max = 0.005;
  std::vector<FlowTrace> runs;
  for (int w : {1, 2, 8}) {
    par::set_worker_count(w);
    runs.push_back(run(perturbed(), cfg));
  }
  par::set_worker_count(1);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    REQUIRE(runs[r].rows.size() == runs[0].rows.size());
    for (std::size_t k = 0; k < runs[0].rows.size(); ++k) CHECK(identical(runs[r].rows[k], runs[0].rows[k]));
    CHECK(identical(runs[r].snapshots.back().field, runs[0].snapshots.back().field));
  }
}

}
