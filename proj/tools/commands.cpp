#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hmflow/diagnostics.hpp"
#include "hmflow/errors.hpp"
#include "hmflow/flow.hpp"
#include "hmflow/manifest.hpp"
#include "hmflow/parallel.hpp"
#include "hmflow/reports.hpp"
#include "hmflow/snapshot.hpp"
#include "hmflow/spec_io.hpp"

namespace hmflow::cli {

namespace fs = std::filesystem;

namespace {

// Flag values that override the config file when given.
struct Overrides {
  std::optional<std::string> config;
  std::optional<int> threads;
  std::optional<int> n;
  std::optional<double> L;
  std::optional<double> cfl, t_max, tension_stop, snapshot_every, guard, eps0, t_start;
  std::optional<int> record_every;
  std::optional<double> perturb;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon, R, xi, bubble_R, candidate_radius;
  std::optional<int> count, max_power;
  std::optional<double> sigma, beta;
  std::optional<int> levels, seeds;
  std::optional<std::string> out_dir, run_id;
};

template <typename T, typename U>
void apply(const std::optional<T>& v, U& target) {
  if (v) target = *v;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config ? load_run_config(*o.config) : RunConfig{};
  apply(o.n, c.grid.n);
  apply(o.L, c.grid.half_width);
  apply(o.cfl, c.flow.cfl);
  apply(o.t_max, c.flow.t_max);
  apply(o.tension_stop, c.flow.tension_stop);
  apply(o.snapshot_every, c.flow.snapshot_every);
  apply(o.record_every, c.flow.record_every);
  apply(o.guard, c.flow.energy_blowup_guard);
  apply(o.eps0, c.flow.epsilon0);
  apply(o.t_start, c.flow.t_start);
  apply(o.perturb, c.perturb.amplitude);
  apply(o.seed, c.perturb.seed);
  apply(o.epsilon, c.diagnostics.epsilon);
  apply(o.R, c.diagnostics.R);
  apply(o.xi, c.diagnostics.xi);
  apply(o.bubble_R, c.diagnostics.bubble_R);
  apply(o.candidate_radius, c.diagnostics.candidate_radius);
  apply(o.count, c.laurent.count);
  apply(o.max_power, c.laurent.max_power);
  apply(o.sigma, c.laurent.sigma);
  apply(o.beta, c.laurent.beta);
  apply(o.seed, c.laurent.seed);
  apply(o.seed, c.scan.seed);
  apply(o.levels, c.scan.levels);
  apply(o.seeds, c.scan.seeds);
  apply(o.out_dir, c.output_dir);
  apply(o.run_id, c.run_id);
  c.validate();
  if (o.threads) {
    if (*o.threads < 1) throw Error(ErrorKind::InvalidParams, "--threads must be >= 1");
    par::set_worker_count(*o.threads);
  }
  return c;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "YAML run configuration; flags override it")->check(CLI::ExistingFile);
  app->add_option("--threads", o.threads, "worker count for the parallel kernels");
}

void add_grid(CLI::App* app, Overrides& o) {
  app->add_option("--n", o.n, "points per chart side (odd, >= 65)");
  app->add_option("--L", o.L, "chart half-width");
  app->add_option("--perturb", o.perturb, "amplitude of a seeded smooth tangent perturbation");
  app->add_option("--seed", o.seed, "perturbation seed");
}

void add_output(CLI::App* app, Overrides& o) {
  app->add_option("--out-dir", o.out_dir, "output directory");
  app->add_option("--id", o.run_id, "run identifier used in file names");
}

MapField field_from_spec(const std::string& spec_path, const RunConfig& c) {
  const MapSpecFile spec = load_map_spec(spec_path);
  MapField f = sample_field(spec.source(), c.grid.n, c.grid.half_width);
  if (c.perturb.amplitude > 0.0) f = perturb(f, c.perturb.amplitude, c.perturb.seed);
  return f;
}

Region parse_region(const std::string& kind, const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--" + kind + ": not a number '" + item + "'");
    }
  }
  auto center = [&] {
    const Vec3 c(v[0], v[1], v[2]);
    if (!(c.norm() > 0.0)) throw Error(ErrorKind::InvalidArgument, "--" + kind + ": center must be nonzero");
    return SpherePoint(c.normalized());
  };
  if (kind == "disk") {
    if (v.size() != 4) throw Error(ErrorKind::InvalidArgument, "--disk expects cx,cy,cz,r");
    return Region::disk(center(), v[3]);
  }
  if (v.size() != 5) throw Error(ErrorKind::InvalidArgument, "--annulus expects cx,cy,cz,r_inner,r_outer");
  return Region::annulus(center(), v[3], v[4]);
}

constexpr const char* kIdentitySpec = "kind: rational\nnumerator: [0, 1]\ndenominator: [1]\n";

void print(const Summary& s) { std::cout << s.str(); }

// ---------------------------------------------------------------- commands

int do_gen(const Overrides& o, const std::string& spec_path, const std::string& out) {
  const RunConfig c = resolve(o);
  Manifest m("gen", c);
  m.set_argument("spec", spec_path);
  const MapSpecFile spec = load_map_spec(spec_path);
  const MapField f = field_from_spec(spec_path, c);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_snapshot(path, f);
  m.add_output(path);
  m.write(fs::path(out + ".manifest.json"));
  Summary s;
  s.add("snapshot", path.string());
  s.add("n", c.grid.n);
  s.add("L", c.grid.half_width);
  s.add("expected_degree", spec.expected_degree());
  s.add("bytes", static_cast<long>(fs::file_size(path)));
  print(s);
  return kExitOk;
}

int do_energy(const Overrides& o, const std::string& snap, bool whole, const std::vector<std::string>& disks,
              const std::vector<std::string>& annuli, const std::optional<std::string>& csv) {
  resolve(o);
  const MapField f = read_snapshot(snap);
  std::vector<Region> regions;
  if (whole || (disks.empty() && annuli.empty())) regions.push_back(Region::whole_sphere());
  for (const auto& d : disks) regions.push_back(parse_region("disk", d));
  for (const auto& a : annuli) regions.push_back(parse_region("annulus", a));
  const DensityField dens = energy_density(f);
  std::vector<EnergyReport> reports;
  for (const auto& r : regions) {
    const auto rep = energy_report(dens, r);
    reports.push_back(rep);
    Summary s;
    s.add("region", describe(r));
    s.add("E", rep.E);
    s.add("E_d", rep.E_d);
    s.add("E_dbar", rep.E_db);
    s.add("kappa", rep.kappa);
    s.add("degree_energy", rep.degree_energy);
    s.add("degree_pullback", rep.degree_pullback);
    if (r.kind == Region::Kind::WholeSphere) s.add("degree", round_degree(rep.degree_pullback));
    print(s);
  }
  if (csv) write_file_atomic(*csv, energy_csv(reports));
  return kExitOk;
}

int do_tension(const Overrides& o, const std::string& snap) {
  resolve(o);
  const MapField f = read_snapshot(snap);
  const TensionField t = compute_tension(f);
  Summary s;
  s.add("delta", tension_l2(t));
  s.add("sup", tension_sup(t));
  s.add("max_normal_component", t.max_normal_component(f));
  print(s);
  return kExitOk;
}

int do_flow(const Overrides& o, const std::optional<std::string>& snap, const std::optional<std::string>& spec) {
  if (snap.has_value() == spec.has_value()) {
    throw CLI::ValidationError("flow", "exactly one of --snapshot or --spec is required");
  }
  const RunConfig c = resolve(o);
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  Manifest m("flow", c);
  MapField initial = snap ? read_snapshot(*snap) : field_from_spec(*spec, c);
  if (snap) {
    m.set_argument("snapshot", *snap);
    if (c.perturb.amplitude > 0.0) initial = perturb(initial, c.perturb.amplitude, c.perturb.seed);
  } else {
    m.set_argument("spec", *spec);
  }

  std::vector<fs::path> outputs;
  const auto sink = [&](const FlowSnapshot& s) {
    const fs::path p = dir / snapshot_name(c.run_id, s.t);
    write_snapshot(p, s.field);
    outputs.push_back(p);
  };
  FlowTrace trace;
  try {
    trace = run(initial, c.flow, sink);
  } catch (const Error&) {
    for (const auto& p : outputs) m.add_output(p);
    m.set_status("aborted", true);
    m.write(dir / ("run-" + c.run_id + ".manifest.json"));
    throw;
  }
  const fs::path csv = dir / ("trace-" + c.run_id + ".csv");
  write_file_atomic(csv, trace_csv(trace));
  m.add_output(csv);
  for (const auto& p : outputs) m.add_output(p);
  m.set_status(to_string(trace.status));
  m.write(dir / ("run-" + c.run_id + ".manifest.json"));

  const auto& first = trace.rows.front();
  const auto& last = trace.rows.back();
  Summary s;
  s.add("status", to_string(trace.status));
  s.add("steps", trace.steps);
  s.add("rows", static_cast<long>(trace.rows.size()));
  s.add("snapshots", static_cast<long>(trace.snapshots.size()));
  s.add("t_end", last.t);
  s.add("E_start", first.E);
  s.add("E_end", last.E);
  s.add("delta_start", first.delta);
  s.add("delta_end", last.delta);
  s.add("dist4pi_end", last.dist4pi);
  s.add("trace", csv.string());
  print(s);
  return trace.status == FlowStatus::BlowupDetected ? kExitNumerical : kExitOk;
}

int do_scan_loj(const Overrides& o, const std::optional<std::string>& spec, const std::vector<std::string>& traces,
                bool svg) {
  const RunConfig c = resolve(o);
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  Manifest m("scan-loj", c);
  const MapSpecFile map = spec ? load_map_spec(*spec) : parse_map_spec(kIdentitySpec, "identity");
  m.set_argument("spec", spec.value_or("identity"));
  const MapField harmonic = sample_field(map.source(), c.grid.n, c.grid.half_width);

  std::vector<LojSample> samples;
  for (int k = 0; k < c.scan.seeds; ++k) {
    const auto seed = c.scan.seed + static_cast<std::uint64_t>(k);
    const auto part = loj_samples_from_perturbations(harmonic, seed, c.scan.levels, "perturb-seed" + std::to_string(seed));
    samples.insert(samples.end(), part.begin(), part.end());
  }
  for (const auto& t : traces) {
    FlowTrace tr;
    tr.rows = parse_trace_csv(read_text_file(t), t);
    const auto part = loj_samples_from_trace(tr, fs::path(t).stem().string());
    samples.insert(samples.end(), part.begin(), part.end());
  }
  const fs::path csv = dir / ("loj-" + c.run_id + ".csv");
  write_file_atomic(csv, loj_csv(samples));
  m.add_output(csv);

  Summary s;
  s.add("samples", static_cast<long>(samples.size()));
  std::optional<LojFit> fit;
  try {
    fit = fit_loj_exponent(samples);
    s.add("alpha_hat", fit->alpha_hat);
    s.add("intercept", fit->intercept);
    s.add("r2", fit->r2);
    s.add("decades", fit->decades);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientSpread) throw;
    s.add("fit", std::string("insufficient_spread"));
    m.set_status("ok", true);
  }
  if (svg) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& x : samples) xy.emplace_back(std::exp(x.log_delta), std::exp(x.log_dist));
    const fs::path p = dir / ("loj-" + c.run_id + ".svg");
    write_file_atomic(p, svg_loglog(xy, "dist(E, 4piZ) vs ||T||", "delta", "dist", fit ? &*fit : nullptr));
    m.add_output(p);
  }
  s.add("csv", csv.string());
  m.write(dir / ("loj-" + c.run_id + ".manifest.json"));
  print(s);
  return kExitOk;
}

int do_bubbles(const Overrides& o, const std::string& snap, const std::optional<std::string>& csv) {
  const RunConfig c = resolve(o);
  const MapField f = read_snapshot(snap);
  BubbleSearch opts;
  opts.R = c.diagnostics.bubble_R;
  opts.candidate_radius = c.diagnostics.candidate_radius;
  const auto found = detect_bubbles(f, c.diagnostics.epsilon, opts);
  Summary s;
  s.add("epsilon", c.diagnostics.epsilon);
  s.add("count", static_cast<long>(found.size()));
  for (std::size_t i = 0; i < found.size(); ++i) {
    const auto& d = found[i];
    const std::string k = "bubble" + std::to_string(i);
    s.add(k + ".center", fmt(d.center.x()) + "," + fmt(d.center.y()) + "," + fmt(d.center.z()));
    s.add(k + ".lambda", d.lambda);
    s.add(k + ".resolution_floor", d.resolution_floor);
  }
  print(s);
  if (csv) write_file_atomic(*csv, bubbles_csv(found));
  return kExitOk;
}

int do_laurent(const Overrides& o, bool write_outputs) {
  const RunConfig c = resolve(o);
  LaurentSweep p;
  p.count = c.laurent.count;
  p.max_power = c.laurent.max_power;
  p.sigma = c.laurent.sigma;
  p.beta = c.laurent.beta;
  p.seed = c.laurent.seed;
  const auto r = laurent_sweep(p);
  Summary s;
  s.add("forms", p.count);
  s.add("max_power", p.max_power);
  s.add("sigma", p.sigma);
  s.add("beta", p.beta);
  s.add("seed", std::to_string(p.seed));
  s.add("checks", r.checks);
  s.add("violations", r.violations);
  s.add("beta_admissible", r.beta_admissible);
  s.add("beta_form_violations", r.beta_violations);
  s.add("max_convexity_defect", r.max_convexity_defect);
  s.add("max_monomial_defect", r.max_monomial_defect);
  s.add("monomials_ok", r.monomials_ok);
  print(s);
  if (write_outputs) {
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    Manifest m("laurent", c);
    const fs::path p = dir / ("laurent-" + c.run_id + ".txt");
    write_file_atomic(p, s.str());
    m.add_output(p);
    m.write(dir / ("laurent-" + c.run_id + ".manifest.json"));
  }
  return kExitOk;
}

struct ReportLine {
  std::string source;
  std::string kind;
  std::vector<LojSample> samples;
  std::vector<TraceRow> rows;
};

int do_report(const Overrides& o, const std::string& in_dir, const std::optional<std::string>& out, bool svg) {
  const RunConfig c = resolve(o);
  if (!fs::is_directory(in_dir)) throw Error(ErrorKind::Io, "not a directory: " + in_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in_dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    const auto stem = e.path().stem().string();
    if (stem.starts_with("trace") || stem.starts_with("loj")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cout << "no inputs\n";
    return kExitOk;
  }
  std::vector<ReportLine> lines;
  for (const auto& f : files) {
    ReportLine l;
    l.source = f.filename().string();
    const std::string text = read_text_file(f);
    if (f.stem().string().starts_with("trace")) {
      l.kind = "trace";
      l.rows = parse_trace_csv(text, f.string());
      FlowTrace tr;
      tr.rows = l.rows;
      l.samples = loj_samples_from_trace(tr, l.source);
    } else {
      l.kind = "loj";
      l.samples = parse_loj_csv(text, f.string());
    }
    lines.push_back(std::move(l));
  }
  std::string table = "source,kind,rows,t_end,E_start,E_end,delta_start,delta_end,samples,alpha_hat,intercept,r2\n";
  Manifest m("report", c);
  const fs::path out_path = out ? fs::path(*out) : fs::path(in_dir) / "report.csv";
  for (const auto& l : lines) {
    std::string fitcols = ",,";
    std::optional<LojFit> fit;
    try {
      fit = fit_loj_exponent(l.samples);
      fitcols = fmt(fit->alpha_hat) + "," + fmt(fit->intercept) + "," + fmt(fit->r2);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientSpread) throw;
    }
    std::string tracecols = ",,,,,";
    if (!l.rows.empty()) {
      tracecols = fmt(l.rows.back().t) + "," + fmt(l.rows.front().E) + "," + fmt(l.rows.back().E) + "," +
                  fmt(l.rows.front().delta) + "," + fmt(l.rows.back().delta);
    }
    table += l.source + "," + l.kind + "," + std::to_string(l.rows.size()) + "," + tracecols + "," +
             std::to_string(l.samples.size()) + "," + fitcols + "\n";
    if (svg && !l.samples.empty()) {
      std::vector<std::pair<double, double>> xy;
      for (const auto& x : l.samples) xy.emplace_back(std::exp(x.log_delta), std::exp(x.log_dist));
      const fs::path p = out_path.parent_path() / (fs::path(l.source).stem().string() + ".svg");
      write_file_atomic(p, svg_loglog(xy, l.source, "delta", "dist", fit ? &*fit : nullptr));
      m.add_output(p);
    }
  }
  write_file_atomic(out_path, table);
  m.add_output(out_path);
  m.write(out_path.parent_path() / "report.manifest.json");
  Summary s;
  s.add("inputs", static_cast<long>(lines.size()));
  s.add("report", out_path.string());
  print(s);
  return kExitOk;
}

int do_verify(const std::string& path) {
  const auto r = verify_manifests(path);
  Summary s;
  s.add("files_checked", r.files_checked);
  s.add("ok", r.ok());
  print(s);
  for (const auto& p : r.problems) std::cerr << "verify: " << p << "\n";
  return r.ok() ? kExitOk : kExitValidation;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::StepTooLarge:
    case ErrorKind::NonFinite:
      return kExitNumerical;
    default:
      return kExitValidation;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Harmonic map flow laboratory for maps of the 2-sphere"};
  app.require_subcommand(1);
  Overrides o;

  auto* gen = app.add_subcommand("gen", "sample a map spec into an SPHM snapshot");
  std::string gen_spec, gen_out;
  gen->add_option("spec", gen_spec, "YAML map spec")->required();
  gen->add_option("-o,--out", gen_out, "output snapshot path")->required();
  add_common(gen, o);
  add_grid(gen, o);

  auto* energy = app.add_subcommand("energy", "energy report of a snapshot");
  std::string en_snap;
  bool en_whole = false;
  std::vector<std::string> en_disks, en_annuli;
  std::optional<std::string> en_csv;
  energy->add_option("snapshot", en_snap)->required()->check(CLI::ExistingFile);
  energy->add_flag("--whole", en_whole, "whole sphere (default when no region is given)");
  energy->add_option("--disk", en_disks, "cx,cy,cz,r")->take_all();
  energy->add_option("--annulus", en_annuli, "cx,cy,cz,r_inner,r_outer")->take_all();
  energy->add_option("--csv", en_csv, "write the reports as CSV");
  add_common(energy, o);

  auto* tension = app.add_subcommand("tension", "tension norms of a snapshot");
  std::string te_snap;
  tension->add_option("snapshot", te_snap)->required()->check(CLI::ExistingFile);
  add_common(tension, o);

  auto* flow = app.add_subcommand("flow", "run the harmonic map flow");
  std::optional<std::string> fl_snap, fl_spec;
  flow->add_option("--snapshot", fl_snap, "initial field")->check(CLI::ExistingFile);
  flow->add_option("--spec", fl_spec, "initial map spec")->check(CLI::ExistingFile);
  flow->add_option("--tmax", o.t_max, "final time");
  flow->add_option("--t0", o.t_start, "time of the initial field (resumed runs)");
  flow->add_option("--cfl", o.cfl, "dt = cfl h^2 sigma_min^2, cfl in (0, 0.5]");
  flow->add_option("--tension-stop", o.tension_stop, "stop once ||T|| falls to this value");
  flow->add_option("--snapshot-every", o.snapshot_every, "snapshot interval in time units (0: first and last only)");
  flow->add_option("--record-every", o.record_every, "steps between trace rows");
  flow->add_option("--guard", o.guard, "blow-up guard factor");
  flow->add_option("--eps0", o.eps0, "density threshold constant of the blow-up guard");
  add_common(flow, o);
  add_grid(flow, o);
  add_output(flow, o);

  auto* scan = app.add_subcommand("scan-loj", "Lojasiewicz scatter samples and exponent fit");
  std::optional<std::string> sc_spec;
  std::vector<std::string> sc_traces;
  bool sc_svg = false;
  scan->add_option("--spec", sc_spec, "harmonic map spec (default: identity)")->check(CLI::ExistingFile);
  scan->add_option("--trace", sc_traces, "additional trace CSVs")->check(CLI::ExistingFile);
  scan->add_option("--n", o.n, "points per chart side");
  scan->add_option("--L", o.L, "chart half-width");
  scan->add_option("--seed", o.seed, "first perturbation seed");
  scan->add_option("--seeds", o.seeds, "number of perturbation seeds");
  scan->add_option("--levels", o.levels, "amplitudes 10^(-k/2), k = 1..levels");
  scan->add_flag("--svg", sc_svg, "also write a log-log scatter plot");
  add_common(scan, o);
  add_output(scan, o);

  auto* bubbles = app.add_subcommand("bubbles", "detect bubble centers and outer energy scales");
  std::string bu_snap;
  std::optional<std::string> bu_csv;
  bubbles->add_option("snapshot", bu_snap)->required()->check(CLI::ExistingFile);
  bubbles->add_option("--epsilon", o.epsilon, "annulus energy threshold");
  bubbles->add_option("--R", o.bubble_R, "outer radius of the scale scan");
  bubbles->add_option("--candidate-radius", o.candidate_radius, "candidate density threshold radius");
  bubbles->add_option("--csv", bu_csv, "write detections as CSV");
  add_common(bubbles, o);

  auto* laurent = app.add_subcommand("laurent", "three-annulus oracle over random Laurent forms");
  bool la_write = false;
  laurent->add_option("--random", o.count, "number of random forms");
  laurent->add_option("--sigma", o.sigma, "annulus ratio sigma > 1");
  laurent->add_option("--beta", o.beta, "exponent beta in (0, 1/2]");
  laurent->add_option("--seed", o.seed, "sweep seed");
  laurent->add_option("--max-power", o.max_power, "truncation |n| <= max_power");
  laurent->add_flag("--write", la_write, "write the summary and a manifest into --out-dir");
  add_common(laurent, o);
  add_output(laurent, o);

  auto* report = app.add_subcommand("report", "aggregate trace and scan CSVs into a table");
  std::string re_dir;
  std::optional<std::string> re_out;
  bool re_svg = false;
  report->add_option("dir", re_dir, "directory holding trace-*.csv / loj-*.csv")->required();
  report->add_option("--out", re_out, "output table (default: <dir>/report.csv)");
  report->add_flag("--svg", re_svg, "write log-log scatter plots");
  add_common(report, o);

  auto* verify = app.add_subcommand("verify", "recompute the hashes listed in run manifests");
  std::string ve_path;
  verify->add_option("path", ve_path, "manifest file or directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return do_gen(o, gen_spec, gen_out);
    if (*energy) return do_energy(o, en_snap, en_whole, en_disks, en_annuli, en_csv);
    if (*tension) return do_tension(o, te_snap);
    if (*flow) return do_flow(o, fl_snap, fl_spec);
    if (*scan) return do_scan_loj(o, sc_spec, sc_traces, sc_svg);
    if (*bubbles) return do_bubbles(o, bu_snap, bu_csv);
    if (*laurent) return do_laurent(o, la_write);
    if (*report) return do_report(o, re_dir, re_out, re_svg);
    if (*verify) return do_verify(ve_path);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hmflow: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "hmflow: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "hmflow: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace hmflow::cli
