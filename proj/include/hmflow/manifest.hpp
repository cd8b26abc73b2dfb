#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hmflow/spec_io.hpp"

namespace hmflow {

inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Collects what a run produced and writes manifest JSON atomically: config
/// echo, tool version, start/end wall time, termination status, and every
/// output file (relative to the manifest's directory) with size and SHA-256.
class Manifest {
 public:
  Manifest(std::string command, const RunConfig& config);

  void set_argument(const std::string& key, const std::string& value) { arguments_[key] = value; }
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path); }
  void set_status(std::string status, bool partial = false) {
    status_ = std::move(status);
    partial_ = partial;
  }
  void write(const std::filesystem::path& manifest_path) const;

 private:
  std::string command_;
  RunConfig config_;
  std::map<std::string, std::string> arguments_;
  std::vector<std::filesystem::path> outputs_;
  std::string status_ = "ok";
  bool partial_ = false;
  std::chrono::system_clock::time_point started_;
};

struct VerifyReport {
  int files_checked = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Recomputes hashes of every output listed in a manifest, or of every
/// `*manifest.json` in a directory.
VerifyReport verify_manifests(const std::filesystem::path& manifest_or_dir);

}  // namespace hmflow
