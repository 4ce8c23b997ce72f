// Copyright 2026 The geolink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run reports and key=value configuration.
//
// A report is a human-readable summary followed by a machine-readable block of
// key=value lines. The config.* keys of that block are also the keys accepted
// by config files, so a report can be fed back as a config to rerun it.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>

#include "geolink/error.hpp"
#include "geolink/linkage.hpp"

namespace geolink {

inline constexpr std::string_view kMachineSection = "--- machine-readable ---";

using KeyValues = std::map<std::string, std::string>;

// Reads key=value lines; blank lines, lines starting with '#' and lines
// without '=' are skipped. Later keys win.
inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) continue;
    kv[std::string(detail::trim(view.substr(0, eq)))] = std::string(detail::trim(view.substr(eq + 1)));
  }
  return kv;
}

inline KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

namespace detail {

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  if constexpr (std::is_same_v<T, bool>) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw Error("config key '" + key + "' expects a boolean, got '" + value + "'");
  } else {
    auto v = parse_number<T>(value);
    if (!v) throw Error("config key '" + key + "' has unparsable value '" + value + "'");
    return *v;
  }
}

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace detail

// Applies the config.* keys (the prefix is optional) onto cfg. Unknown keys
// outside the config namespace are ignored so whole reports can be loaded.
inline void apply_config(LinkConfig& cfg, const KeyValues& kv) {
  for (const auto& [raw_key, value] : kv) {
    std::string_view key = raw_key;
    const bool prefixed = key.starts_with("config.");
    if (prefixed) key.remove_prefix(7);
    const std::string k(key);
    if (k == "d") cfg.d = detail::parse_value<std::int64_t>(k, value);
    else if (k == "M") cfg.periods = detail::parse_value<std::int32_t>(k, value);
    else if (k == "h_s") cfg.bandwidths.spatial_m = detail::parse_value<double>(k, value);
    else if (k == "h_t") cfg.bandwidths.temporal = detail::parse_value<double>(k, value);
    else if (k == "alpha") cfg.mix.alpha = detail::parse_value<double>(k, value);
    else if (k == "q") cfg.q = detail::parse_value<double>(k, value);
    else if (k == "k") cfg.k = detail::parse_value<std::size_t>(k, value);
    else if (k == "d_c") cfg.cutoff_m = value == "auto" ? std::nullopt : std::optional(detail::parse_value<double>(k, value));
    else if (k == "xi_threshold") cfg.xi_threshold = detail::parse_value<double>(k, value);
    else if (k == "varpi_threshold") cfg.varpi_threshold = detail::parse_value<double>(k, value);
    else if (k == "s_delta") cfg.s_delta = detail::parse_value<double>(k, value);
    else if (k == "outliers") cfg.stages.outliers = detail::parse_value<bool>(k, value);
    else if (k == "weights") cfg.stages.weights = detail::parse_value<bool>(k, value);
    else if (k == "pruning") cfg.stages.pruning = detail::parse_value<bool>(k, value);
    else if (prefixed && k != "threads") throw Error("unknown config key '" + raw_key + "'");
  }
}

inline void write_config(std::ostream& out, const LinkConfig& cfg) {
  using detail::format_double;
  out << "config.d=" << cfg.d << '\n'
      << "config.M=" << cfg.periods << '\n'
      << "config.h_s=" << format_double(cfg.bandwidths.spatial_m) << '\n'
      << "config.h_t=" << format_double(cfg.bandwidths.temporal) << '\n'
      << "config.alpha=" << format_double(cfg.mix.alpha) << '\n'
      << "config.q=" << format_double(cfg.q) << '\n'
      << "config.k=" << cfg.k << '\n'
      << "config.d_c=" << (cfg.cutoff_m ? format_double(*cfg.cutoff_m) : std::string("auto")) << '\n'
      << "config.xi_threshold=" << format_double(cfg.xi_threshold) << '\n'
      << "config.varpi_threshold=" << format_double(cfg.varpi_threshold) << '\n'
      << "config.s_delta=" << format_double(cfg.s_delta) << '\n'
      << "config.outliers=" << (cfg.stages.outliers ? 1 : 0) << '\n'
      << "config.weights=" << (cfg.stages.weights ? 1 : 0) << '\n'
      << "config.pruning=" << (cfg.stages.pruning ? 1 : 0) << '\n';
}

struct ReportInputs {
  std::string left_path;
  std::string right_path;
  std::string truth_path;  // empty when no ground truth was given
};

inline void write_report(std::ostream& out, const ReportInputs& inputs, const LinkConfig& cfg, const LinkOutput& run,
                         const std::optional<LinkageResult>& metrics) {
  using detail::format_double;
  out << "geolink link report\n";
  out << "left:  " << inputs.left_path << '\n';
  out << "right: " << inputs.right_path << '\n';
  if (!inputs.truth_path.empty()) out << "truth: " << inputs.truth_path << '\n';
  out << std::fixed << std::setprecision(3);
  out << "grid: " << run.grid.d << "x" << run.grid.d << " cells, periods: " << run.time.periods << '\n';
  out << "Time-Preprocessing: " << run.timings.preprocessing_s << " s\n";
  out << "Time-Calculation:   " << run.timings.calculation_s << " s\n";
  out << "candidates scored: " << run.candidates_scored << ", pairs returned: " << run.pairs.size() << '\n';
  if (metrics) {
    out << std::setprecision(4) << "precision " << metrics->precision << "  recall " << metrics->recall << "  F1 "
        << metrics->f1 << '\n';
  }
  out.unsetf(std::ios::floatfield);

  out << '\n' << kMachineSection << '\n';
  write_config(out, cfg);
  out << "input.left=" << inputs.left_path << '\n' << "input.right=" << inputs.right_path << '\n';
  if (!inputs.truth_path.empty()) out << "input.truth=" << inputs.truth_path << '\n';
  out << "grid.min_lat=" << format_double(run.grid.min_lat) << '\n'
      << "grid.min_lng=" << format_double(run.grid.min_lng) << '\n'
      << "grid.max_lat=" << format_double(run.grid.max_lat) << '\n'
      << "grid.max_lng=" << format_double(run.grid.max_lng) << '\n'
      << "grid.d=" << run.grid.d << '\n'
      << "grid.ref_lat=" << format_double(run.grid.ref_lat) << '\n'
      << "time.t_min=" << format_double(run.time.t_min) << '\n'
      << "time.t_max=" << format_double(run.time.t_max) << '\n'
      << "time.M=" << run.time.periods << '\n'
      << "dp.d_c=" << format_double(run.dp.cutoff_m) << '\n'
      << "timing.preprocessing_s=" << format_double(run.timings.preprocessing_s) << '\n'
      << "timing.calculation_s=" << format_double(run.timings.calculation_s) << '\n'
      << "counters.candidates=" << run.candidates_scored << '\n'
      << "counters.kernel_spatial=" << run.kernel_evaluations.spatial << '\n'
      << "counters.kernel_temporal=" << run.kernel_evaluations.temporal << '\n'
      << "counters.pairs=" << run.pairs.size() << '\n';
  if (metrics) {
    out << "metrics.M=" << metrics->correct << '\n'
        << "metrics.N=" << metrics->truth << '\n'
        << "metrics.K=" << metrics->returned << '\n'
        << "metrics.precision=" << format_double(metrics->precision) << '\n'
        << "metrics.recall=" << format_double(metrics->recall) << '\n'
        << "metrics.f1=" << format_double(metrics->f1) << '\n';
  }
  auto removed = [&](std::string_view side, const std::vector<RemovedCells>& list) {
    for (const auto& r : list) {
      out << "removed." << side << '.' << r.account << '=';
      for (std::size_t i = 0; i < r.cells.size(); ++i) out << (i ? ";" : "") << r.cells[i];
      out << '\n';
    }
  };
  removed("left", run.removed_left);
  removed("right", run.removed_right);
  for (const auto& p : run.pairs) out << "pair=" << p.left << ',' << p.right << ',' << format_double(p.score) << '\n';
}

// Reads back the pair=... lines of a report.
inline std::vector<ScoredPair> read_report_pairs(std::istream& in) {
  std::vector<ScoredPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (!view.starts_with("pair=")) continue;
    view.remove_prefix(5);
    auto fields = detail::split_fields(view);
    if (fields.size() != 3) throw ParseError("malformed pair line", line_no);
    auto score = detail::parse_number<double>(fields[2]);
    if (!score) throw ParseError("unparsable pair score", line_no);
    pairs.push_back({std::string(fields[0]), std::string(fields[1]), *score});
  }
  return pairs;
}

}  // namespace geolink
