#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hmflow/energetics.hpp"
#include "hmflow/map_field.hpp"

namespace hmflow {

// Start times closer than this to a step-lattice time k * dt are taken to be
// that time (snapshot names carry six decimals).
inline constexpr double kResumeTimeTolerance = 5e-7;

struct FlowConfig {
  double cfl = 0.2;
  double t_max = 1.0;
  double tension_stop = 1e-8;
  double snapshot_every = 0.0;  // 0: snapshots only at start and end
  int record_every = 50;
  double energy_blowup_guard = 1.0;
  double epsilon0 = 0.3;
  // Time of the initial field. A run resumed from a snapshot of another run
  // with the same config repeats that run's remaining steps bit for bit.
  double t_start = 0.0;

  void validate() const;
};

enum class FlowStatus { ReachedTMax, TensionStop, BlowupDetected };

std::string to_string(FlowStatus status);

struct TraceRow {
  double t = 0.0;
  double E = 0.0;
  double E_d = 0.0;
  double E_db = 0.0;
  double delta = 0.0;
  double dist4pi = 0.0;
  double max_density = 0.0;
  double dt = 0.0;
  int snapshot = -1;  // index into FlowTrace::snapshots, or -1
};

struct FlowSnapshot {
  double t = 0.0;
  MapField field;
};

struct FlowTrace {
  std::vector<TraceRow> rows;
  std::vector<FlowSnapshot> snapshots;
  FlowStatus status = FlowStatus::ReachedTMax;
  long steps = 0;

  const FlowSnapshot& snapshot_at(double t) const;
};

/// dt = cfl * h^2 * sigma_min^2 with sigma_min the conformal factor at the
/// chart corners.
double stable_dt(const GridGeometry& g, double cfl);

/// One forward-Euler step u <- normalize(u + dt T(u)) on the active nodes of
/// both charts, followed by sync_overlap. Throws StepTooLarge if dt exceeds
/// stable_dt(g, 0.5) and NonFinite if any updated value is not finite.
MapField step(const MapField& field, double dt);

/// Same update driven by the projected tension and without renormalization;
/// used to check that the two forms agree to O(dt^2).
MapField step_projected_unnormalized(const MapField& field, double dt);

/// Optional observer invoked for every stored snapshot (e.g. to write files).
using SnapshotSink = std::function<void(const FlowSnapshot&)>;

/// Integrates the flow until t_max, until ||T|| <= tension_stop, or until the
/// largest energy density exceeds epsilon0 * guard / h^2 (BlowupDetected).
FlowTrace run(const MapField& initial, const FlowConfig& cfg, const SnapshotSink& sink = {});

/// |Delta(t2) - Delta(t1) + int_{t1}^{t2} delta^2 dt| with Delta = E - 4 pi n,
/// trapezoidal in time over the trace rows (linear interpolation at the ends).
double energy_identity_residual(const FlowTrace& trace, double t1, double t2);

struct LocalDrift {
  double drift = 0.0;
  double bound_rhs = 0.0;
  double cutoff_gradient_sup = 0.0;
  double tension_time_integral = 0.0;
  int k = 1;
};

/// Change of the cutoff-weighted antiholomorphic energy between two stored
/// snapshots, and sup|grad phi| sqrt(k) int delta dt for the cutoff used. The
/// cutoff falls from 1 to 0 across the last 8h (geodesic) inside the region.
LocalDrift local_energy_drift(const FlowTrace& trace, const Region& region, double t1, double t2);

/// Cutoff function used by local_energy_drift and its gradient bound.
struct RegionCutoff {
  Region region;
  double width = 0.0;
  double value(const SpherePoint& p) const;
  double gradient_sup() const;
};
RegionCutoff make_cutoff(const Region& region, double h);

}  // namespace hmflow
