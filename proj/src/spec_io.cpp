#include "hmflow/spec_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "hmflow/errors.hpp"
#include "hmflow/map_field.hpp"

namespace hmflow {

namespace {

[[noreturn]] void fail(const std::string& origin, const YAML::Node& node, const std::string& msg) {
  std::ostringstream os;
  os << origin;
  if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
  os << ": " << msg;
  throw Error(ErrorKind::Parse, os.str());
}

// Rejects keys outside `allowed`; `where` names the section for messages.
void check_keys(const std::string& origin, const YAML::Node& map, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) fail(origin, map, std::string(where) + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(origin, kv.first, "unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
T scalar(const std::string& origin, const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(origin, node, "key '" + key + "' expects a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(origin, node, "key '" + key + "' has an invalid value '" + node.Scalar() + "'");
  }
}

template <typename T>
void optional(const std::string& origin, const YAML::Node& map, const char* key, T& out) {
  const YAML::Node v = map[key];
  if (v) out = scalar<T>(origin, v, key);
}

Complex complex_value(const std::string& origin, const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {scalar<double>(origin, node, key), 0.0};
  if (node.IsSequence() && node.size() == 2) {
    return {scalar<double>(origin, node[0], key), scalar<double>(origin, node[1], key)};
  }
  fail(origin, node, "key '" + key + "' expects a number or a [re, im] pair");
}

std::vector<Complex> coefficients(const std::string& origin, const YAML::Node& node, const std::string& key) {
  if (!node) fail(origin, node, "missing key '" + key + "'");
  if (!node.IsSequence() || node.size() == 0) fail(origin, node, "key '" + key + "' expects a non-empty list");
  std::vector<Complex> c;
  for (const auto& item : node) c.push_back(complex_value(origin, item, key));
  return c;
}

Orientation orientation(const std::string& origin, const YAML::Node& node) {
  if (!node) return Orientation::Holomorphic;
  const auto s = scalar<std::string>(origin, node, "orientation");
  if (s == "holomorphic") return Orientation::Holomorphic;
  if (s == "antiholomorphic") return Orientation::Antiholomorphic;
  fail(origin, node, "key 'orientation' must be 'holomorphic' or 'antiholomorphic', got '" + s + "'");
}

RationalMapSpec rational(const std::string& origin, const YAML::Node& node, std::string_view where,
                         bool allow_kind) {
  if (allow_kind) {
    check_keys(origin, node, where, {"kind", "orientation", "numerator", "denominator"});
  } else {
    check_keys(origin, node, where, {"orientation", "numerator", "denominator"});
  }
  RationalMapSpec s;
  s.orientation = orientation(origin, node["orientation"]);
  s.numerator = coefficients(origin, node["numerator"], "numerator");
  s.denominator = coefficients(origin, node["denominator"], "denominator");
  return s;
}

YAML::Node load_yaml(const std::string& text, const std::string& origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorKind::Parse, origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

}  // namespace

MapSource MapSpecFile::source() const {
  return kind == Kind::Rational ? make_source(rational) : make_source(glued);
}

int MapSpecFile::expected_degree() const {
  return kind == Kind::Rational ? rational.signed_degree() : glued.expected_degree();
}

MapSpecFile parse_map_spec(const std::string& text, const std::string& origin) {
  const YAML::Node root = load_yaml(text, origin);
  if (!root.IsMap()) fail(origin, root, "spec must be a mapping");
  const YAML::Node kind = root["kind"];
  if (!kind) fail(origin, root, "missing key 'kind'");
  const auto k = scalar<std::string>(origin, kind, "kind");
  MapSpecFile out;
  if (k == "rational") {
    out.kind = MapSpecFile::Kind::Rational;
    out.rational = rational(origin, root, "spec", true);
    out.rational.validate();
  } else if (k == "glued") {
    out.kind = MapSpecFile::Kind::Glued;
    check_keys(origin, root, "spec", {"kind", "body", "bubbles", "cutoff_width"});
    if (!root["body"]) fail(origin, root, "missing key 'body'");
    out.glued.body = rational(origin, root["body"], "body", false);
    optional(origin, root, "cutoff_width", out.glued.cutoff_width);
    const YAML::Node bubbles = root["bubbles"];
    if (!bubbles) fail(origin, root, "missing key 'bubbles'");
    if (!bubbles.IsSequence()) fail(origin, bubbles, "key 'bubbles' expects a list");
    for (const auto& b : bubbles) {
      check_keys(origin, b, "bubble", {"attach", "scale", "map"});
      Bubble bub;
      if (!b["attach"]) fail(origin, b, "missing key 'attach'");
      if (!b["scale"]) fail(origin, b, "missing key 'scale'");
      if (!b["map"]) fail(origin, b, "missing key 'map'");
      bub.attach_point = complex_value(origin, b["attach"], "attach");
      bub.scale = scalar<double>(origin, b["scale"], "scale");
      bub.map = rational(origin, b["map"], "bubble map", false);
      out.glued.bubbles.push_back(bub);
    }
    out.glued.validate();
  } else {
    fail(origin, kind, "key 'kind' must be 'rational' or 'glued', got '" + k + "'");
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

MapSpecFile load_map_spec(const std::filesystem::path& path) {
  return parse_map_spec(read_text_file(path), path.string());
}

void RunConfig::validate() const {
  // Constructing the geometry performs the grid checks.
  (void)grid_geometry(grid.n, grid.half_width);
  flow.validate();
  if (!(perturb.amplitude >= 0.0)) throw Error(ErrorKind::InvalidParams, "perturb.amplitude must be >= 0");
  if (!(diagnostics.epsilon > 0.0)) throw Error(ErrorKind::InvalidParams, "diagnostics.epsilon must be positive");
  if (!(diagnostics.R > 0.0 && diagnostics.R <= 1.0)) throw Error(ErrorKind::InvalidParams, "diagnostics.R must lie in (0, 1]");
  if (!(diagnostics.bubble_R > 0.0 && diagnostics.bubble_R <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "diagnostics.bubble_R must lie in (0, 1]");
  }
  if (!(diagnostics.xi > 0.0)) throw Error(ErrorKind::InvalidParams, "diagnostics.xi must be positive");
  if (!(diagnostics.candidate_radius > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "diagnostics.candidate_radius must be positive");
  }
  if (laurent.count < 0) throw Error(ErrorKind::InvalidParams, "laurent.count must be >= 0");
  if (laurent.max_power < 0) throw Error(ErrorKind::InvalidParams, "laurent.max_power must be >= 0");
  if (!(laurent.sigma > 1.0)) throw Error(ErrorKind::InvalidParams, "laurent.sigma must exceed 1");
  if (!(laurent.beta > 0.0 && laurent.beta <= 0.5)) throw Error(ErrorKind::InvalidParams, "laurent.beta must lie in (0, 1/2]");
  if (scan.levels < 1) throw Error(ErrorKind::InvalidParams, "scan.levels must be >= 1");
  if (scan.seeds < 1) throw Error(ErrorKind::InvalidParams, "scan.seeds must be >= 1");
  if (run_id.empty() || run_id.find_first_of("/\\") != std::string::npos) {
    throw Error(ErrorKind::InvalidParams, "run_id must be a non-empty name without path separators");
  }
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  const YAML::Node root = load_yaml(text, origin);
  RunConfig c;
  if (root.IsNull()) return c;  // defaults are valid
  check_keys(origin, root, "config", {"grid", "flow", "perturb", "diagnostics", "laurent", "scan", "output_dir", "run_id"});
  if (const auto g = root["grid"]) {
    check_keys(origin, g, "grid", {"n", "half_width"});
    optional(origin, g, "n", c.grid.n);
    optional(origin, g, "half_width", c.grid.half_width);
  }
  if (const auto f = root["flow"]) {
    check_keys(origin, f, "flow",
               {"cfl", "t_max", "tension_stop", "snapshot_every", "record_every", "energy_blowup_guard", "epsilon0"});
    optional(origin, f, "cfl", c.flow.cfl);
    optional(origin, f, "t_max", c.flow.t_max);
    optional(origin, f, "tension_stop", c.flow.tension_stop);
    optional(origin, f, "snapshot_every", c.flow.snapshot_every);
    optional(origin, f, "record_every", c.flow.record_every);
    optional(origin, f, "energy_blowup_guard", c.flow.energy_blowup_guard);
    optional(origin, f, "epsilon0", c.flow.epsilon0);
  }
  if (const auto p = root["perturb"]) {
    check_keys(origin, p, "perturb", {"amplitude", "seed"});
    optional(origin, p, "amplitude", c.perturb.amplitude);
    optional(origin, p, "seed", c.perturb.seed);
  }
  if (const auto d = root["diagnostics"]) {
    check_keys(origin, d, "diagnostics", {"epsilon", "R", "xi", "bubble_R", "candidate_radius"});
    optional(origin, d, "epsilon", c.diagnostics.epsilon);
    optional(origin, d, "R", c.diagnostics.R);
    optional(origin, d, "xi", c.diagnostics.xi);
    optional(origin, d, "bubble_R", c.diagnostics.bubble_R);
    optional(origin, d, "candidate_radius", c.diagnostics.candidate_radius);
  }
  if (const auto l = root["laurent"]) {
    check_keys(origin, l, "laurent", {"count", "max_power", "sigma", "beta", "seed"});
    optional(origin, l, "count", c.laurent.count);
    optional(origin, l, "max_power", c.laurent.max_power);
    optional(origin, l, "sigma", c.laurent.sigma);
    optional(origin, l, "beta", c.laurent.beta);
    optional(origin, l, "seed", c.laurent.seed);
  }
  if (const auto s = root["scan"]) {
    check_keys(origin, s, "scan", {"levels", "seeds", "seed"});
    optional(origin, s, "levels", c.scan.levels);
    optional(origin, s, "seeds", c.scan.seeds);
    optional(origin, s, "seed", c.scan.seed);
  }
  optional(origin, root, "output_dir", c.output_dir);
  optional(origin, root, "run_id", c.run_id);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.string());
}

}  // namespace hmflow
