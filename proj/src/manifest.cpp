#include "hmflow/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <ctime>
#include <json.hpp>
#include <memory>

#include "hmflow/errors.hpp"
#include "hmflow/snapshot.hpp"

namespace hmflow {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

namespace {

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_json(const RunConfig& c) {
  return json{
      {"grid", {{"n", c.grid.n}, {"half_width", c.grid.half_width}}},
      {"flow",
       {{"cfl", c.flow.cfl},
        {"t_max", c.flow.t_max},
        {"tension_stop", c.flow.tension_stop},
        {"snapshot_every", c.flow.snapshot_every},
        {"record_every", c.flow.record_every},
        {"energy_blowup_guard", c.flow.energy_blowup_guard},
        {"epsilon0", c.flow.epsilon0}}},
      {"perturb", {{"amplitude", c.perturb.amplitude}, {"seed", c.perturb.seed}}},
      {"diagnostics",
       {{"epsilon", c.diagnostics.epsilon},
        {"R", c.diagnostics.R},
        {"xi", c.diagnostics.xi},
        {"bubble_R", c.diagnostics.bubble_R},
        {"candidate_radius", c.diagnostics.candidate_radius}}},
      {"laurent",
       {{"count", c.laurent.count},
        {"max_power", c.laurent.max_power},
        {"sigma", c.laurent.sigma},
        {"beta", c.laurent.beta},
        {"seed", c.laurent.seed}}},
      {"scan", {{"levels", c.scan.levels}, {"seeds", c.scan.seeds}, {"seed", c.scan.seed}}},
      {"output_dir", c.output_dir},
      {"run_id", c.run_id},
  };
}

}  // namespace

Manifest::Manifest(std::string command, const RunConfig& config)
    : command_(std::move(command)), config_(config), started_(std::chrono::system_clock::now()) {}

void Manifest::write(const fs::path& manifest_path) const {
  const fs::path base = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
  json outputs = json::array();
  for (const auto& p : outputs_) {
    outputs.push_back({{"path", fs::relative(p, base).generic_string()},
                       {"bytes", fs::file_size(p)},
                       {"sha256", sha256_file(p)}});
  }
  json j = {
      {"tool", "hmflow"},
      {"version", kToolVersion},
      {"command", command_},
      {"arguments", arguments_},
      {"config", config_json(config_)},
      {"started", iso_time(started_)},
      {"finished", iso_time(std::chrono::system_clock::now())},
      {"status", status_},
      {"partial", partial_},
      {"outputs", outputs},
  };
  write_file_atomic(manifest_path, j.dump(2) + "\n");
}

namespace {

void verify_one(const fs::path& manifest, VerifyReport& report) {
  json j;
  try {
    j = json::parse(read_text_file(manifest));
  } catch (const json::exception& e) {
    report.problems.push_back(manifest.string() + ": invalid JSON: " + e.what());
    return;
  }
  if (!j.contains("outputs") || !j["outputs"].is_array()) {
    report.problems.push_back(manifest.string() + ": no output list");
    return;
  }
  const fs::path base = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
  for (const auto& o : j["outputs"]) {
    const fs::path p = base / o.value("path", std::string());
    ++report.files_checked;
    if (!fs::exists(p)) {
      report.problems.push_back(p.string() + ": missing");
      continue;
    }
    if (sha256_file(p) != o.value("sha256", std::string())) {
      report.problems.push_back(p.string() + ": hash mismatch");
    }
  }
}

}  // namespace

VerifyReport verify_manifests(const fs::path& target) {
  VerifyReport report;
  if (fs::is_directory(target)) {
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(target)) {
      const auto name = e.path().filename().string();
      if (e.is_regular_file() && name.size() >= 13 && name.ends_with("manifest.json")) found.push_back(e.path());
    }
    std::sort(found.begin(), found.end());
    if (found.empty()) report.problems.push_back(target.string() + ": no manifest found");
    for (const auto& m : found) verify_one(m, report);
  } else if (fs::exists(target)) {
    verify_one(target, report);
  } else {
    throw Error(ErrorKind::Io, "no such file or directory: " + target.string());
  }
  return report;
}

}  // namespace hmflow
