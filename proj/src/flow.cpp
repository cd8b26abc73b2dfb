#include "hmflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmflow/diagnostics.hpp"
#include "hmflow/errors.hpp"
#include "hmflow/parallel.hpp"
#include "quadrature.hpp"
#include "stencils.hpp"

namespace hmflow {

using detail::ci;
using detail::kCharts;

void FlowConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 0.5)) throw Error(ErrorKind::InvalidParams, "cfl must lie in (0, 0.5]");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw Error(ErrorKind::InvalidParams, "t_max must be finite and >= 0");
  if (!(tension_stop > 0.0)) throw Error(ErrorKind::InvalidParams, "tension_stop must be positive");
  if (!(snapshot_every >= 0.0)) throw Error(ErrorKind::InvalidParams, "snapshot_every must be >= 0");
  if (record_every < 1) throw Error(ErrorKind::InvalidParams, "record_every must be >= 1");
  if (!(energy_blowup_guard > 0.0)) throw Error(ErrorKind::InvalidParams, "energy_blowup_guard must be positive");
  if (!(epsilon0 > 0.0)) throw Error(ErrorKind::InvalidParams, "epsilon0 must be positive");
  if (!(t_start >= 0.0) || !std::isfinite(t_start)) throw Error(ErrorKind::InvalidParams, "t_start must be finite and >= 0");
}

std::string to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::ReachedTMax:
      return "reached_t_max";
    case FlowStatus::TensionStop:
      return "tension_stop";
    case FlowStatus::BlowupDetected:
      return "blowup_detected";
  }
  return "unknown";
}

const FlowSnapshot& FlowTrace::snapshot_at(double t) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  }
  throw Error(ErrorKind::RangeError, "no snapshot stored at t = " + std::to_string(t));
}

double stable_dt(const GridGeometry& g, double cfl) {
  const double s = g.sigma_min();
  return cfl * g.h * g.h * s * s;
}

namespace {

struct PassResult {
  double delta = 0.0;
  double max_density = 0.0;
};

// Raw tension on every interior node that is either advanced by the flow or
// carries quadrature weight. Returns the L2 norm of the projected tension and
// the largest energy density on weighted nodes.
PassResult tension_pass(const MapField& field, std::array<std::vector<Vec3>, 2>& traw, bool measure) {
  const auto& g = field.geometry();
  const int n = g.n;
  const double h2 = g.h * g.h;
  std::vector<double> rows(2 * static_cast<std::size_t>(n), 0.0);
  std::vector<double> row_max(2 * static_cast<std::size_t>(n), 0.0);
  for (ChartId chart : kCharts) {
    const int c = ci(chart);
    traw[c].assign(static_cast<std::size_t>(n) * n, Vec3::Zero());
    const auto& u = field.grid(chart).values;
    auto& out = traw[c];
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (int j = kStencilReach; j < n - kStencilReach; ++j) {
      double s = 0.0;
      double m = 0.0;
      for (int i = kStencilReach; i < n - kStencilReach; ++i) {
        const int k = g.index(i, j);
        const double w = g.weight[k];
        if (!g.active[k] && (!measure || w == 0.0)) continue;
        const auto d = detail::derivatives(u, k, n, g.h);
        const double grad2 = d.ux.squaredNorm() + d.uy.squaredNorm();
        const double s2 = g.sigma[k] * g.sigma[k];
        const Vec3 t = (d.lap + grad2 * u[k]) / s2;
        out[k] = t;
        if (measure && w != 0.0) {
          const Vec3 tp = t - t.dot(u[k]) * u[k];
          s += w * tp.squaredNorm() * s2 * h2;
          m = std::max(m, 0.5 * grad2 / s2);
        }
      }
      rows[c * n + j] = s;
      row_max[c * n + j] = m;
    }
  }
  PassResult r;
  if (measure) {
    r.delta = std::sqrt(par::ordered_sum(rows));
    r.max_density = *std::max_element(row_max.begin(), row_max.end());
  }
  return r;
}

template <typename Update>
void apply_update(MapField& field, const std::array<std::vector<Vec3>, 2>& traw, Update&& update) {
  const auto& g = field.geometry();
  const int n = g.n;
  bool finite = true;
  for (ChartId chart : kCharts) {
    auto& u = field.grid(chart).values;
    const auto& t = traw[ci(chart)];
#pragma omp parallel for schedule(static) num_threads(par::worker_count()) reduction(&& : finite)
    for (int j = kStencilReach; j < n - kStencilReach; ++j) {
      for (int i = kStencilReach; i < n - kStencilReach; ++i) {
        const int k = g.index(i, j);
        if (!g.active[k]) continue;
        u[k] = update(u[k], t[k]);
        finite = finite && u[k].allFinite();
      }
    }
  }
  if (!finite) throw Error(ErrorKind::NonFinite, "flow step produced a non-finite value");
  sync_overlap_inplace(field);
}

void check_dt(const GridGeometry& g, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (dt > stable_dt(g, 0.5) * (1.0 + 1e-12)) {
    throw Error(ErrorKind::StepTooLarge, "dt exceeds 0.5 h^2 sigma_min^2");
  }
}

void euler_inplace(MapField& field, std::array<std::vector<Vec3>, 2>& traw, double dt) {
  apply_update(field, traw, [dt](const Vec3& u, const Vec3& t) -> Vec3 { return (u + dt * t).normalized(); });
}

}  // namespace

MapField step(const MapField& field, double dt) {
  check_dt(field.geometry(), dt);
  MapField out = field;
  std::array<std::vector<Vec3>, 2> traw;
  tension_pass(out, traw, false);
  euler_inplace(out, traw, dt);
  return out;
}

MapField step_projected_unnormalized(const MapField& field, double dt) {
  check_dt(field.geometry(), dt);
  MapField out = field;
  std::array<std::vector<Vec3>, 2> traw;
  tension_pass(out, traw, false);
  apply_update(out, traw, [dt](const Vec3& u, const Vec3& t) -> Vec3 { return u + dt * (t - t.dot(u) * u); });
  return out;
}

FlowTrace run(const MapField& initial, const FlowConfig& cfg, const SnapshotSink& sink) {
  cfg.validate();
  const auto& g = initial.geometry();
  const double dt = stable_dt(g, cfg.cfl);
  const double guard = cfg.epsilon0 * cfg.energy_blowup_guard / (g.h * g.h);

  FlowTrace trace;
  MapField u = initial;
  std::array<std::vector<Vec3>, 2> traw;
  // Times are k * dt on the global step counter k, so a resumed run lands
  // on exactly the same times as the original. A start time within the
  // precision of snapshot file names (%.6f) of a lattice time snaps to it.
  const long k0 = std::llround(cfg.t_start / dt);
  const double snap = std::max(1e-9 * dt, std::min(0.25 * dt, kResumeTimeTolerance));
  const bool on_lattice = std::abs(static_cast<double>(k0) * dt - cfg.t_start) <= snap;
  auto time_of = [&](long k) { return on_lattice ? static_cast<double>(k) * dt : cfg.t_start + (k - k0) * dt; };
  long k = k0;
  double t = time_of(k);
  double dt_last = 0.0;
  double next_snapshot = t;
  long steps = 0;
  bool clipped = false;

  for (;;) {
    const PassResult pass = tension_pass(u, traw, true);
    FlowStatus status = FlowStatus::ReachedTMax;
    bool stopping = true;
    if (pass.delta <= cfg.tension_stop) {
      status = FlowStatus::TensionStop;
    } else if (pass.max_density > guard) {
      status = FlowStatus::BlowupDetected;
    } else if (clipped || t >= cfg.t_max) {
      status = FlowStatus::ReachedTMax;
    } else {
      stopping = false;
    }

    int snap = -1;
    if (stopping || t >= next_snapshot - 1e-12 * std::max(1.0, t)) {
      trace.snapshots.push_back({t, u});
      snap = static_cast<int>(trace.snapshots.size()) - 1;
      if (sink) sink(trace.snapshots.back());
      if (cfg.snapshot_every > 0.0) {
        // next multiple of snapshot_every after t
        next_snapshot = (std::floor(t / cfg.snapshot_every + 1e-9) + 1.0) * cfg.snapshot_every;
      } else {
        next_snapshot = std::numeric_limits<double>::infinity();
      }
    }
    if (stopping || k % cfg.record_every == 0 || snap >= 0) {
      const auto rep = energy_report(u);
      TraceRow row;
      row.t = t;
      row.E = rep.E;
      row.E_d = rep.E_d;
      row.E_db = rep.E_db;
      row.delta = pass.delta;
      row.dist4pi = dist_to_4pi_lattice(rep.E).dist;
      row.max_density = pass.max_density;
      row.dt = dt_last;
      row.snapshot = snap;
      trace.rows.push_back(row);
    }
    if (stopping) {
      trace.status = status;
      break;
    }

    // Fixed dt; the last step is shortened to land on t_max.
    const double t_next = time_of(k + 1);
    double h_step = dt;
    if (t_next >= cfg.t_max - 1e-9 * dt) {
      h_step = cfg.t_max - t;
      clipped = true;
    }
    euler_inplace(u, traw, h_step);
    ++steps;
    ++k;
    t = clipped ? cfg.t_max : t_next;
    dt_last = h_step;
  }
  trace.steps = steps;
  return trace;
}

namespace {

// Linear interpolation of a row column at time t; rows sorted by t.
template <typename Col>
double interp(const std::vector<TraceRow>& rows, double t, Col&& col) {
  auto it = std::lower_bound(rows.begin(), rows.end(), t, [](const TraceRow& r, double v) { return r.t < v; });
  if (it == rows.end()) return col(rows.back());
  if (it == rows.begin() || it->t == t) return col(*it);
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return (1 - s) * col(a) + s * col(b);
}

// Trapezoidal integral of col over [t1, t2] through the trace rows.
template <typename Col>
double integrate(const std::vector<TraceRow>& rows, double t1, double t2, Col&& col) {
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(t1, interp(rows, t1, col));
  for (const auto& r : rows) {
    if (r.t > t1 && r.t < t2) pts.emplace_back(r.t, col(r));
  }
  pts.emplace_back(t2, interp(rows, t2, col));
  std::vector<double> parts;
  parts.reserve(pts.size());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    parts.push_back(0.5 * (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second));
  }
  return par::ordered_sum(parts);
}

void check_window(const FlowTrace& trace, double t1, double t2) {
  if (trace.rows.empty()) throw Error(ErrorKind::RangeError, "empty trace");
  const double lo = trace.rows.front().t;
  const double hi = trace.rows.back().t;
  const double slack = 1e-12 * std::max(1.0, hi);
  if (t1 > t2 || t1 < lo - slack || t2 > hi + slack) {
    throw Error(ErrorKind::RangeError, "time window outside the trace");
  }
}

}  // namespace

double energy_identity_residual(const FlowTrace& trace, double t1, double t2) {
  check_window(trace, t1, t2);
  if (t1 == t2) return 0.0;
  const auto& rows = trace.rows;
  // Delta = E - 4 pi n with n fixed over the window; it cancels in the
  // difference.
  const double e1 = interp(rows, t1, [](const TraceRow& r) { return r.E; });
  const double e2 = interp(rows, t2, [](const TraceRow& r) { return r.E; });
  const double dissipation = integrate(rows, t1, t2, [](const TraceRow& r) { return r.delta * r.delta; });
  return std::abs(e2 - e1 + dissipation);
}

namespace {

double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

}  // namespace

double RegionCutoff::value(const SpherePoint& p) const {
  switch (region.kind) {
    case Region::Kind::WholeSphere:
      return 1.0;
    case Region::Kind::Disk: {
      const double th = geodesic_distance(region.center, p);
      const double out = stereo_to_geodesic_radius(region.outer_radius);
      return smoothstep5((out - th) / width);
    }
    case Region::Kind::Annulus: {
      const double th = geodesic_distance(region.center, p);
      const double in = stereo_to_geodesic_radius(region.inner_radius);
      const double out = stereo_to_geodesic_radius(region.outer_radius);
      return smoothstep5((th - in) / width) * smoothstep5((out - th) / width);
    }
    case Region::Kind::DiskComplement: {
      double v = 1.0;
      for (const auto& [c, r] : region.holes) {
        v *= smoothstep5((geodesic_distance(c, p) - stereo_to_geodesic_radius(r)) / width);
      }
      return v;
    }
  }
  return 0.0;
}

double RegionCutoff::gradient_sup() const {
  if (region.kind == Region::Kind::WholeSphere) return 0.0;
  // max of the quintic smoothstep derivative is 15/8
  return 15.0 / (8.0 * width);
}

RegionCutoff make_cutoff(const Region& region, double h) {
  region.validate();
  RegionCutoff c{region, 8.0 * h};
  const double w = c.width;
  switch (region.kind) {
    case Region::Kind::Disk:
      if (stereo_to_geodesic_radius(region.outer_radius) < w) {
        throw Error(ErrorKind::InvalidArgument, "disk too small for the cutoff margin");
      }
      break;
    case Region::Kind::Annulus:
      if (stereo_to_geodesic_radius(region.outer_radius) - stereo_to_geodesic_radius(region.inner_radius) < 2 * w) {
        throw Error(ErrorKind::InvalidArgument, "annulus too thin for the cutoff margin");
      }
      break;
    case Region::Kind::DiskComplement:
      for (const auto& [ctr, r] : region.holes) {
        if (stereo_to_geodesic_radius(r) + w > std::numbers::pi) {
          throw Error(ErrorKind::InvalidArgument, "disk complement too small for the cutoff margin");
        }
      }
      break;
    case Region::Kind::WholeSphere:
      break;
  }
  return c;
}

LocalDrift local_energy_drift(const FlowTrace& trace, const Region& region, double t1, double t2) {
  check_window(trace, t1, t2);
  const auto& s1 = trace.snapshot_at(t1);
  const auto& s2 = trace.snapshot_at(t2);
  const auto& g = s1.field.geometry();
  const RegionCutoff cut = make_cutoff(region, g.h);

  std::array<std::vector<double>, 2> phi;
  for (ChartId chart : kCharts) {
    const auto& pts = g.points(chart);
    auto& p = phi[ci(chart)];
    p.assign(pts.size(), 0.0);
#pragma omp parallel for schedule(static) num_threads(par::worker_count())
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (g.weight[k] != 0.0) p[k] = cut.value(pts[k]);
    }
  }
  const double h2 = g.h * g.h;
  auto weighted = [&](const DensityField& d) {
    return detail::weighted_sum(g, [&](ChartId chart, int k) {
      return phi[ci(chart)][k] * d.e_db[ci(chart)][k] * g.sigma[k] * g.sigma[k] * h2;
    });
  };

  LocalDrift r;
  r.cutoff_gradient_sup = cut.gradient_sup();
  if (t1 == t2) {
    r.drift = 0.0;
  } else {
    r.drift = std::abs(weighted(energy_density(s2.field)) - weighted(energy_density(s1.field)));
    r.tension_time_integral = integrate(trace.rows, t1, t2, [](const TraceRow& row) { return row.delta; });
  }
  const double e0 = trace.rows.front().E;
  r.k = std::max(1, static_cast<int>(std::ceil(e0 / (4.0 * std::numbers::pi) - 1e-9)));
  r.bound_rhs = r.cutoff_gradient_sup * std::sqrt(static_cast<double>(r.k)) * r.tension_time_integral;
  return r;
}

}  // namespace hmflow
