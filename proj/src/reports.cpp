#include "hmflow/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hmflow/errors.hpp"

namespace hmflow {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string point(const SpherePoint& p) { return fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(p.z()); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& s, const std::string& origin, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) + ": not a number '" + s + "'");
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

std::string describe(const Region& r) {
  switch (r.kind) {
    case Region::Kind::WholeSphere:
      return "whole";
    case Region::Kind::Disk:
      return "disk(" + point(r.center) + " r=" + fmt(r.outer_radius) + ")";
    case Region::Kind::Annulus:
      return "annulus(" + point(r.center) + " r=" + fmt(r.inner_radius) + ".." + fmt(r.outer_radius) + ")";
    case Region::Kind::DiskComplement: {
      std::string s = "complement(";
      for (std::size_t i = 0; i < r.holes.size(); ++i) {
        if (i) s += ";";
        s += point(r.holes[i].first) + " r=" + fmt(r.holes[i].second);
      }
      return s + ")";
    }
  }
  return "?";
}

std::string trace_csv(const FlowTrace& trace) {
  std::string s = std::string(kTraceHeader) + "\n";
  for (const auto& r : trace.rows) {
    s += fmt(r.t) + "," + fmt(r.E) + "," + fmt(r.E_d) + "," + fmt(r.E_db) + "," + fmt(r.delta) + "," + fmt(r.dist4pi) +
         "," + fmt(r.max_density) + "," + fmt(r.dt) + "\n";
  }
  return s;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text, const std::string& origin) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kTraceHeader) {
    throw Error(ErrorKind::Parse, origin + ":1: expected header '" + std::string(kTraceHeader) + "'");
  }
  std::vector<TraceRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i]);
    const int ln = static_cast<int>(i) + 1;
    if (c.size() != 8) throw Error(ErrorKind::Parse, origin + ":" + std::to_string(ln) + ": expected 8 columns");
    TraceRow r;
    r.t = number(c[0], origin, ln);
    r.E = number(c[1], origin, ln);
    r.E_d = number(c[2], origin, ln);
    r.E_db = number(c[3], origin, ln);
    r.delta = number(c[4], origin, ln);
    r.dist4pi = number(c[5], origin, ln);
    r.max_density = number(c[6], origin, ln);
    r.dt = number(c[7], origin, ln);
    rows.push_back(r);
  }
  return rows;
}

std::string energy_csv(const std::vector<EnergyReport>& reports) {
  std::string s = "region,E,E_d,E_dbar,kappa,degree_energy,degree_pullback\n";
  for (const auto& r : reports) {
    s += "\"" + describe(r.region) + "\"," + fmt(r.E) + "," + fmt(r.E_d) + "," + fmt(r.E_db) + "," + fmt(r.kappa) +
         "," + fmt(r.degree_energy) + "," + fmt(r.degree_pullback) + "\n";
  }
  return s;
}

std::string loj_csv(const std::vector<LojSample>& samples) {
  std::string s = "label,log_delta,log_dist,lambda_max\n";
  for (const auto& x : samples) {
    s += x.label + "," + fmt(x.log_delta) + "," + fmt(x.log_dist) + "," + fmt(x.lambda_max) + "\n";
  }
  return s;
}

std::vector<LojSample> parse_loj_csv(const std::string& text, const std::string& origin) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "label,log_delta,log_dist,lambda_max") {
    throw Error(ErrorKind::Parse, origin + ":1: not a Lojasiewicz sample table");
  }
  std::vector<LojSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i]);
    const int ln = static_cast<int>(i) + 1;
    if (c.size() != 4) throw Error(ErrorKind::Parse, origin + ":" + std::to_string(ln) + ": expected 4 columns");
    out.push_back({c[0], number(c[1], origin, ln), number(c[2], origin, ln), number(c[3], origin, ln)});
  }
  return out;
}

std::string bubbles_csv(const std::vector<ScaleDetection>& found) {
  std::string s = "cx,cy,cz,epsilon,R,lambda,resolution_floor\n";
  for (const auto& d : found) {
    s += fmt(d.center.x()) + "," + fmt(d.center.y()) + "," + fmt(d.center.z()) + "," + fmt(d.epsilon) + "," +
         fmt(d.R) + "," + fmt(d.lambda) + "," + (d.resolution_floor ? "1" : "0") + "\n";
  }
  return s;
}

std::string Summary::str() const {
  std::string s;
  for (const auto& [k, v] : items_) s += k + "=" + v + "\n";
  return s;
}

std::string svg_loglog(const std::vector<std::pair<double, double>>& xy, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel, const LojFit* fit) {
  const double W = 480, H = 360, M = 50;
  std::vector<std::pair<double, double>> lg;
  for (const auto& [x, y] : xy) {
    if (x > 0 && y > 0) lg.emplace_back(std::log10(x), std::log10(y));
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!lg.empty()) {
    x0 = x1 = lg[0].first;
    y0 = y1 = lg[0].second;
    for (const auto& [x, y] : lg) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  auto X = [&](double x) { return M + (x - x0) / (x1 - x0) * (W - 2 * M); };
  auto Y = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">log10 " << xlabel
     << "</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << H / 2
     << ")\" text-anchor=\"middle\">log10 " << ylabel << "</text>\n";
  os << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& [x, y] : lg) {
    os << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  }
  if (fit) {
    // natural-log fit converted to base 10
    auto line = [&](double x) { return (fit->intercept + fit->alpha_hat * x * std::log(10.0)) / std::log(10.0); };
    os << "<line x1=\"" << X(x0) << "\" y1=\"" << Y(line(x0)) << "\" x2=\"" << X(x1) << "\" y2=\"" << Y(line(x1))
       << "\" stroke=\"firebrick\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hmflow
