#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/diagnostics.hpp"
#include "hmflow/energetics.hpp"
#include "hmflow/flow.hpp"

namespace hmflow {

/// Round-trippable decimal form (%.17g).
std::string fmt(double v);

std::string describe(const Region& region);

inline constexpr const char* kTraceHeader = "t,E,E_d,E_dbar,delta,dist4pi,max_density,dt";

std::string trace_csv(const FlowTrace& trace);
/// Rows of a trace CSV written by trace_csv; snapshot indices are not kept.
std::vector<TraceRow> parse_trace_csv(const std::string& text, const std::string& origin = "<trace>");

std::string energy_csv(const std::vector<EnergyReport>& reports);
std::string loj_csv(const std::vector<LojSample>& samples);
std::string bubbles_csv(const std::vector<ScaleDetection>& found);
std::vector<LojSample> parse_loj_csv(const std::string& text, const std::string& origin = "<loj>");

/// Ordered key=value lines.
class Summary {
 public:
  void add(const std::string& key, const std::string& value) { items_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  std::string str() const;
  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

/// Minimal log-log scatter plot with an optional fitted line y = a + b x in
/// log coordinates.
std::string svg_loglog(const std::vector<std::pair<double, double>>& xy, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel, const LojFit* fit = nullptr);

}  // namespace hmflow
