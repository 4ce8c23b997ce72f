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

// Grid map, time-period partition, and per-account grid / period / joint
// spatio-temporal representations.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/model.hpp"
#include "geolink/parallel.hpp"

namespace geolink {

using CellId = std::int64_t;
using PeriodId = std::int32_t;

// Equirectangular projection constants.
inline constexpr double kMetersPerDegreeLng = 111320.0;
inline constexpr double kMetersPerDegreeLat = 110574.0;

inline constexpr double kExtentMargin = 1e-9;
inline constexpr double kMinSpatialWidth = 1e-6;  // degrees
inline constexpr double kMinTimeWidth = 1.0;      // seconds

struct GridSpec {
  double min_lat = 0.0;
  double min_lng = 0.0;
  double max_lat = 1.0;
  double max_lng = 1.0;
  std::int64_t d = 1;
  double ref_lat = 0.0;

  double cell_height() const { return (max_lat - min_lat) / static_cast<double>(d); }
  double cell_width() const { return (max_lng - min_lng) / static_cast<double>(d); }
  CellId cell_count() const { return d * d; }

  bool contains(double lat, double lng) const {
    return lat >= min_lat && lat <= max_lat && lng >= min_lng && lng <= max_lng;
  }

  // Diagonal of one cell in projected meters.
  double cell_diagonal_meters() const {
    double w = cell_width() * std::cos(ref_lat * std::numbers::pi / 180.0) * kMetersPerDegreeLng;
    double h = cell_height() * kMetersPerDegreeLat;
    return std::hypot(w, h);
  }

  void validate() const {
    if (d < 1) throw Error("grid size d must be >= 1");
    if (!(min_lat < max_lat) || !(min_lng < max_lng)) throw Error("grid extent must satisfy min < max on both axes");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct TimeSpec {
  double t_min = 0.0;
  double t_max = 1.0;
  std::int32_t periods = 1;  // M

  double period_width() const { return (t_max - t_min) / static_cast<double>(periods); }
  bool contains(double t) const { return t >= t_min && t <= t_max; }

  void validate() const {
    if (periods < 1) throw Error("period count M must be >= 1");
    if (!(t_min < t_max)) throw Error("time extent must satisfy t_min < t_max");
  }

  friend bool operator==(const TimeSpec&, const TimeSpec&) = default;
};

// Bounding box and time span covering every record of both datasets.
inline std::pair<GridSpec, TimeSpec> build_specs(std::initializer_list<const Dataset*> datasets, std::int64_t d,
                                                 std::int32_t periods) {
  if (d < 1) throw Error("grid size d must be >= 1");
  if (periods < 1) throw Error("period count M must be >= 1");

  GridSpec grid;
  TimeSpec time;
  grid.d = d;
  time.periods = periods;
  double lat_lo = 90.0, lat_hi = -90.0, lng_lo = 180.0, lng_hi = -180.0;
  Timestamp t_lo = 0, t_hi = 0;
  double lat_sum = 0.0;
  std::size_t n = 0;
  for (const Dataset* ds : datasets) {
    for (const auto& account : ds->accounts()) {
      for (const auto& r : account.records) {
        if (n == 0) t_lo = t_hi = r.timestamp;
        lat_lo = std::min(lat_lo, r.lat);
        lat_hi = std::max(lat_hi, r.lat);
        lng_lo = std::min(lng_lo, r.lng);
        lng_hi = std::max(lng_hi, r.lng);
        t_lo = std::min(t_lo, r.timestamp);
        t_hi = std::max(t_hi, r.timestamp);
        lat_sum += r.lat;
        ++n;
      }
    }
  }
  if (n == 0) throw Error("cannot build grid over an empty dataset");

  auto widen = [](double lo, double hi, double min_width) {
    return hi - lo < min_width ? lo + min_width : hi + kExtentMargin;
  };
  grid.min_lat = lat_lo;
  grid.min_lng = lng_lo;
  grid.max_lat = widen(lat_lo, lat_hi, kMinSpatialWidth);
  grid.max_lng = widen(lng_lo, lng_hi, kMinSpatialWidth);
  grid.ref_lat = lat_sum / static_cast<double>(n);
  time.t_min = static_cast<double>(t_lo);
  time.t_max = widen(static_cast<double>(t_lo), static_cast<double>(t_hi), kMinTimeWidth);
  return {grid, time};
}

inline std::pair<GridSpec, TimeSpec> build_specs(const Dataset& a, const Dataset& b, std::int64_t d,
                                                 std::int32_t periods) {
  return build_specs({&a, &b}, d, periods);
}

inline CellId locate_cell(double lat, double lng, const GridSpec& grid) {
  if (!grid.contains(lat, lng)) throw Error("location outside grid extent");
  auto row = static_cast<std::int64_t>(std::floor((lat - grid.min_lat) / grid.cell_height()));
  auto col = static_cast<std::int64_t>(std::floor((lng - grid.min_lng) / grid.cell_width()));
  row = std::clamp<std::int64_t>(row, 0, grid.d - 1);
  col = std::clamp<std::int64_t>(col, 0, grid.d - 1);
  return row * grid.d + col;
}

inline PeriodId locate_period(double t, const TimeSpec& time) {
  if (!time.contains(t)) throw Error("timestamp outside time extent");
  auto p = static_cast<std::int64_t>(std::floor((t - time.t_min) / time.period_width()));
  return static_cast<PeriodId>(std::clamp<std::int64_t>(p, 0, time.periods - 1));
}

// Cell ids are row-major from the bottom-left: id = row * d + col.
inline std::pair<CellId, PeriodId> locate(const CheckIn& record, const GridSpec& grid, const TimeSpec& time) {
  return {locate_cell(record.lat, record.lng, grid), locate_period(static_cast<double>(record.timestamp), time)};
}

struct PointMeters {
  double x = 0.0;
  double y = 0.0;
};

inline PointMeters project_meters(double lat, double lng, double ref_lat) {
  return {lng * std::cos(ref_lat * std::numbers::pi / 180.0) * kMetersPerDegreeLng, lat * kMetersPerDegreeLat};
}

inline double distance_meters(PointMeters a, PointMeters b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Same projection, but differencing the degrees first so nearby points far
// from the origin keep their precision.
inline double distance_meters(double lat1, double lng1, double lat2, double lng2, double ref_lat) {
  return std::hypot((lng1 - lng2) * std::cos(ref_lat * std::numbers::pi / 180.0) * kMetersPerDegreeLng,
                    (lat1 - lat2) * kMetersPerDegreeLat);
}

// A point in meters from the grid's min corner.
inline PointMeters grid_point_meters(double lat, double lng, const GridSpec& grid) {
  return project_meters(lat - grid.min_lat, lng - grid.min_lng, grid.ref_lat);
}

inline PointMeters cell_center_meters(CellId cell, const GridSpec& grid) {
  if (cell < 0 || cell >= grid.cell_count()) throw Error("cell id " + std::to_string(cell) + " out of range");
  auto row = cell / grid.d;
  auto col = cell % grid.d;
  return project_meters((static_cast<double>(row) + 0.5) * grid.cell_height(),
                        (static_cast<double>(col) + 0.5) * grid.cell_width(), grid.ref_lat);
}

// --- Representations -------------------------------------------------------

struct CellMass {
  CellId cell = 0;
  double probability = 0.0;
};

struct PeriodMass {
  PeriodId period = 0;
  double probability = 0.0;
};

// Entries sorted by ascending cell id.
struct GridRepresentation {
  std::vector<CellMass> entries;
};

// Entries sorted by ascending period id.
struct TimeRepresentation {
  std::vector<PeriodMass> entries;
};

struct SpatioTemporalCell {
  CellId cell = 0;
  double probability = 0.0;        // share of the account's records in this cell
  std::size_t record_count = 0;    // records of the account in this cell
  std::vector<PeriodMass> periods; // per-cell period distribution, ascending period id
};

// Entries sorted by ascending cell id.
struct SpatioTemporalRepresentation {
  std::vector<SpatioTemporalCell> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  const SpatioTemporalCell* find(CellId cell) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), cell,
                               [](const SpatioTemporalCell& e, CellId c) { return e.cell < c; });
    return it != entries.end() && it->cell == cell ? &*it : nullptr;
  }
};

// Everything derived from one account under a fixed pair of specs.
struct AccountRepresentation {
  AccountId account_id;
  std::size_t record_count = 0;
  GridRepresentation grid;
  TimeRepresentation time;
  SpatioTemporalRepresentation joint;
};

inline AccountRepresentation build_representation(const AccountRecordSet& account, const GridSpec& grid,
                                                  const TimeSpec& time) {
  if (account.records.empty()) throw Error("account '" + account.account_id + "' has no records");
  std::map<CellId, std::map<PeriodId, std::size_t>> joint_counts;
  std::map<PeriodId, std::size_t> period_counts;
  for (const auto& r : account.records) {
    auto [cell, period] = locate(r, grid, time);
    ++joint_counts[cell][period];
    ++period_counts[period];
  }

  AccountRepresentation rep;
  rep.account_id = account.account_id;
  rep.record_count = account.records.size();
  const double n = static_cast<double>(rep.record_count);

  rep.joint.entries.reserve(joint_counts.size());
  rep.grid.entries.reserve(joint_counts.size());
  for (const auto& [cell, periods] : joint_counts) {
    SpatioTemporalCell entry;
    entry.cell = cell;
    for (const auto& [p, c] : periods) entry.record_count += c;
    entry.probability = static_cast<double>(entry.record_count) / n;
    const double in_cell = static_cast<double>(entry.record_count);
    entry.periods.reserve(periods.size());
    for (const auto& [p, c] : periods) entry.periods.push_back({p, static_cast<double>(c) / in_cell});
    rep.grid.entries.push_back({cell, entry.probability});
    rep.joint.entries.push_back(std::move(entry));
  }
  rep.time.entries.reserve(period_counts.size());
  for (const auto& [p, c] : period_counts) rep.time.entries.push_back({p, static_cast<double>(c) / n});
  return rep;
}

inline std::vector<AccountRepresentation> build_representations(const Dataset& ds, const GridSpec& grid,
                                                                const TimeSpec& time, unsigned threads = 0) {
  std::vector<AccountRepresentation> reps(ds.size());
  const auto& accounts = ds.accounts();
  parallel_for(accounts.size(), threads,
               [&](std::size_t i) { reps[i] = build_representation(accounts[i], grid, time); });
  return reps;
}

}  // namespace geolink
