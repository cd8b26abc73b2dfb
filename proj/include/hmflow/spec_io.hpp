#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hmflow/analytic_maps.hpp"
#include "hmflow/flow.hpp"

namespace hmflow {

/// A map description read from a YAML spec file (see maps.schema.md).
struct MapSpecFile {
  enum class Kind { Rational, Glued };
  Kind kind = Kind::Rational;
  RationalMapSpec rational;
  BubbleSpec glued;

  MapSource source() const;
  int expected_degree() const;
};

/// Parse and validate. Syntax and schema problems raise Parse errors whose
/// message names the offending key and its line; mathematical problems raise
/// the module's own errors (DegenerateSpec, GluingMismatch, InvalidArgument).
MapSpecFile parse_map_spec(const std::string& text, const std::string& origin = "<spec>");
MapSpecFile load_map_spec(const std::filesystem::path& path);

struct GridConfig {
  int n = 129;
  double half_width = 1.2;
};

struct PerturbConfig {
  double amplitude = 0.0;
  std::uint64_t seed = 1;
};

struct DiagnosticsConfig {
  double epsilon = 0.3;
  double R = 1.0;
  double xi = 1e-2;
  double bubble_R = 0.25;
  double candidate_radius = 0.25;
};

struct LaurentConfig {
  int count = 10000;
  int max_power = 6;
  double sigma = 2.0;
  double beta = 0.25;
  std::uint64_t seed = 7;
};

struct ScanConfig {
  int levels = 8;
  int seeds = 2;
  std::uint64_t seed = 1;
};

/// Parameters shared by all subcommands. Every section and key is optional in
/// the file; unknown keys are rejected.
struct RunConfig {
  GridConfig grid;
  FlowConfig flow;
  PerturbConfig perturb;
  DiagnosticsConfig diagnostics;
  LaurentConfig laurent;
  ScanConfig scan;
  std::string output_dir = ".";
  std::string run_id = "0";

  void validate() const;
};

RunConfig parse_run_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace hmflow
