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

// Fixtures and independent oracles shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "geolink/geolink.hpp"

namespace geolink::testing {

// A d x d grid of unit-degree cells anchored at the origin.
inline GridSpec unit_degree_grid(std::int64_t d) { return GridSpec{0.0, 0.0, double(d), double(d), d, 0.0}; }

// A d x d grid whose cells are `meters` on a side at the equator.
inline GridSpec metric_grid(std::int64_t d, double meters) {
  return GridSpec{0.0, 0.0, d * meters / kMetersPerDegreeLat, d * meters / kMetersPerDegreeLng, d, 0.0};
}

inline CheckIn record_in_cell(const AccountId& id, CellId cell, const GridSpec& g, Timestamp t = 0) {
  const double row = double(cell / g.d), col = double(cell % g.d);
  return {id, g.min_lat + (row + 0.5) * g.cell_height(), g.min_lng + (col + 0.5) * g.cell_width(), t};
}

inline AccountRecordSet account_in_cells(const AccountId& id, const std::vector<CellId>& cells, const GridSpec& g) {
  AccountRecordSet a{id, {}};
  for (CellId c : cells) a.records.push_back(record_in_cell(id, c, g));
  return a;
}

inline TimeSpec single_period() { return TimeSpec{0.0, 1.0, 1}; }

// Counts per cell of the outlier example: a 3x3 block around cell 13, three
// isolated cells holding a single record and one isolated cell holding five.
inline std::vector<CellId> outlier_example_cells() {
  std::vector<CellId> cells;
  for (CellId c : {2, 3, 4, 12, 14, 22, 23, 24})
    for (int i = 0; i < 3; ++i) cells.push_back(c);
  for (int i = 0; i < 8; ++i) cells.push_back(13);
  for (CellId c : {40, 51, 94}) cells.push_back(c);
  for (int i = 0; i < 5; ++i) cells.push_back(46);
  return cells;
}

// --- Oracles ------------------------------------------------------------------

inline double oracle_kernel(double d, double h) {
  return std::exp(-(d * d) / (2.0 * h * h)) / (2.0 * std::numbers::pi * h);
}

// Equirectangular distance written out longhand.
inline double oracle_distance(double lat1, double lng1, double lat2, double lng2, double ref_lat) {
  const double c = std::cos(ref_lat * std::numbers::pi / 180.0);
  const double dx = (lng1 - lng2) * c * 111320.0;
  const double dy = (lat1 - lat2) * 110574.0;
  return std::sqrt(dx * dx + dy * dy);
}

struct OracleParts {
  double spatial = 0.0, temporal = 0.0;
};

inline OracleParts oracle_naive(const AccountRecordSet& a, const AccountRecordSet& b, double h_s, double h_t,
                                double ref_lat, double seconds_per_unit) {
  OracleParts out;
  for (const auto& x : a.records) {
    for (const auto& y : b.records) {
      out.spatial += oracle_kernel(oracle_distance(x.lat, x.lng, y.lat, y.lng, ref_lat), h_s);
      out.temporal += oracle_kernel(double(x.timestamp - y.timestamp) / seconds_per_unit, h_t);
    }
  }
  const double n = double(a.size()) * double(b.size());
  out.spatial /= n;
  out.temporal /= n;
  return out;
}

inline AccountRecordSet random_account(const AccountId& id, std::size_t n, std::mt19937_64& rng, double lat0,
                                       double lng0, double spread_deg, Timestamp t0, Timestamp span) {
  std::uniform_real_distribution<double> off(-spread_deg, spread_deg);
  std::uniform_int_distribution<Timestamp> t(t0, t0 + span);
  AccountRecordSet a{id, {}};
  for (std::size_t i = 0; i < n; ++i) a.records.push_back({id, lat0 + off(rng), lng0 + off(rng), t(rng)});
  return a;
}

inline Dataset dataset_of(std::vector<AccountRecordSet> accounts, std::string label = "t") {
  Dataset ds(std::move(label));
  for (auto& a : accounts) ds.add_account(std::move(a));
  return ds;
}

}  // namespace geolink::testing
