#pragma once

// JSON reports, bit-stable CSV series and companion gnuplot scripts.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "effdio/constants.hpp"
#include "effdio/counting.hpp"
#include "effdio/core.hpp"
#include "effdio/verify.hpp"

namespace effdio {

using Json = nlohmann::ordered_json;

namespace detail {

/// Shortest round-trip text; "inf"/"-inf"/"nan" for non-finite values.
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline Json number_or_text(double v) {
  if (std::isfinite(v)) return v;
  return csv_number(v);
}

}  // namespace detail

inline Json to_json(const Output& o) {
  if (o.number && std::isfinite(*o.number)) return *o.number;
  return o.text;
}

inline Json to_json(const std::vector<Output>& outs) {
  Json j = Json::object();
  for (const auto& o : outs) j[o.name] = to_json(o);
  return j;
}

inline Json to_json(const ConstantsBundle& b) {
  Json j;
  j["theorem"] = b.theorem;
  j["inputs"] = to_json(b.inputs);
  j["outputs"] = to_json(b.outputs);
  j["warnings"] = b.warnings;
  return j;
}

inline Json to_json(const GridSpec& g, const std::vector<std::uint64_t>& points) {
  Json j;
  j["kind"] = g.kind_name();
  j["start"] = g.start;
  j["stop"] = g.stop;
  j["points"] = g.points;
  j["values"] = points;
  return j;
}

inline Json to_json(const ViolationReport& r) {
  Json j;
  j["theorem"] = r.theorem;
  j["inputs"] = to_json(r.inputs);
  j["samples"] = r.samples;
  j["violators"] = r.violators;
  j["fraction"] = r.fraction;
  j["wilson"] = {r.wilson.lo, r.wilson.hi};
  j["delta"] = r.delta;
  j["slack"] = r.slack;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["seed"] = r.seed;
  j["grid"] = to_json(r.grid, r.grid_points);
  j["warnings"] = r.warnings;
  j["constants"] = to_json(r.constants);
  j["min_margin"] = detail::number_or_text(r.min_margin);
  j["violator_x"] = r.violator_x;
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV series

inline constexpr std::string_view kSeriesHeader = "Q,count,main_term,bound,violated";

inline std::string series_csv(const CountSeries& s) {
  require(!s.empty(), "series: refusing to emit an empty series");
  std::string out(kSeriesHeader);
  out += '\n';
  for (const auto& r : s) {
    out += std::to_string(r.Q);
    out += ',';
    out += std::to_string(r.count);
    out += ',';
    out += detail::csv_number(r.main_term);
    out += ',';
    out += detail::csv_number(r.bound);
    out += ',';
    out += r.violated ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline Json series_json(const CountSeries& s) {
  require(!s.empty(), "series: refusing to emit an empty series");
  Json a = Json::array();
  for (const auto& r : s)
    a.push_back({{"Q", r.Q},
                 {"count", r.count},
                 {"main_term", detail::number_or_text(r.main_term)},
                 {"bound", detail::number_or_text(r.bound)},
                 {"violated", r.violated}});
  return a;
}

inline CountSeries parse_series_csv(std::string_view text) {
  CountSeries s;
  std::size_t pos = 0, lineno = 0;
  auto field_error = [&](std::string_view what) {
    return DomainError("series: line " + std::to_string(lineno) + ": bad " + std::string(what));
  };
  auto u64 = [&](std::string_view t, std::string_view what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw field_error(what);
    return v;
  };
  auto real = [&](std::string_view t, std::string_view what) {
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw field_error(what);
    return v;
  };
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    require(nl != std::string_view::npos, "series: missing final newline");
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (lineno == 1) {
      require(line == kSeriesHeader, "series: header must be '" + std::string(kSeriesHeader) + "'");
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto c = line.find(',', start);
      f.push_back(line.substr(start, c - start));
      if (c == std::string_view::npos) break;
      start = c + 1;
    }
    if (f.size() != 5) throw field_error("field count");
    if (f[4] != "0" && f[4] != "1") throw field_error("violated flag");
    s.push_back({u64(f[0], "Q"), u64(f[1], "count"), real(f[2], "main_term"),
                 real(f[3], "bound"), f[4] == "1"});
  }
  require(lineno >= 1, "series: empty input");
  return s;
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  require(static_cast<bool>(out), "write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Gnuplot script plotting count, main term and bound against Q.
inline std::string gnuplot_script(const std::string& csv_path, bool log_x = true) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key top left\n";
  s += "set xlabel 'Q'\n";
  if (log_x) s += "set logscale x\n";
  s += "plot '" + csv_path + "' using 1:2 skip 1 with linespoints title 'count', \\\n";
  s += "     '' using 1:3 skip 1 with lines title 'main term', \\\n";
  s += "     '' using 1:($3+$4) skip 1 with lines dt 2 title 'main + bound', \\\n";
  s += "     '' using 1:($3-$4) skip 1 with lines dt 2 title 'main - bound'\n";
  return s;
}

}  // namespace effdio
