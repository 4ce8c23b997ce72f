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

// User, location and time prediction over per-account regions.
//
// Regions are the density-peaks clusters of an account's cells. With
// p(u) = |R_u| / sum |R|, p(l|u) = region record share and p(t|u,l) the
// smoothed period share inside the region:
//
//   p(u, l, t) = p(u) p(l|u) p(t|u,l)
//   p(u | l, t) = p(u, l, t) / sum_u' p(u', l, t)
//   p(l | u, t) = p(u, l, t) / sum_l' p(u, l', t)
//   time(u, l)  = argmax_t p(t|u,l)

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/index.hpp"
#include "geolink/model.hpp"
#include "geolink/outlier.hpp"
#include "geolink/parallel.hpp"

namespace geolink {

inline constexpr double kTimeSmoothing = 1e-6;

struct Region {
  std::size_t id = 0;
  std::vector<CellId> cells;          // ascending
  std::vector<PointMeters> centers;   // member cell centers
  double share = 0.0;                 // p(l|u)
  std::size_t record_count = 0;
  std::map<PeriodId, std::size_t> period_counts;

  bool contains(CellId c) const { return std::binary_search(cells.begin(), cells.end(), c); }

  double distance_to(PointMeters p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, distance_meters(c, p));
    return best;
  }

  // Additive smoothing over the occupied periods plus the queried one.
  double time_probability(PeriodId t) const {
    const auto it = period_counts.find(t);
    const double support = static_cast<double>(period_counts.size() + (it == period_counts.end() ? 1 : 0));
    const double count = it == period_counts.end() ? 0.0 : static_cast<double>(it->second);
    return (count + kTimeSmoothing) / (static_cast<double>(record_count) + kTimeSmoothing * support);
  }
};

struct UserProfile {
  AccountId account_id;
  std::size_t record_count = 0;
  double prior = 0.0;  // p(u)
  std::vector<Region> regions;

  // The region containing the point's cell, else the nearest one.
  const Region& resolve(CellId cell, PointMeters where) const {
    for (const auto& r : regions)
      if (r.contains(cell)) return r;
    const Region* best = &regions.front();
    double best_d = best->distance_to(where);
    for (const auto& r : regions) {
      double d = r.distance_to(where);
      if (d < best_d) {
        best_d = d;
        best = &r;
      }
    }
    return *best;
  }
};

class ProfileSet {
 public:
  ProfileSet(GridSpec grid, TimeSpec time, std::vector<UserProfile> profiles)
      : grid_(grid), time_(time), profiles_(std::move(profiles)) {
    for (std::size_t i = 0; i < profiles_.size(); ++i) index_.emplace(profiles_[i].account_id, i);
  }

  const GridSpec& grid() const { return grid_; }
  const TimeSpec& time() const { return time_; }
  const std::vector<UserProfile>& profiles() const { return profiles_; }

  const UserProfile& at(const AccountId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown account '" + id + "'");
    return profiles_[it->second];
  }

  // Query coordinates are clamped into the extents.
  CellId query_cell(double lat, double lng) const {
    return locate_cell(std::clamp(lat, grid_.min_lat, grid_.max_lat), std::clamp(lng, grid_.min_lng, grid_.max_lng),
                       grid_);
  }
  PeriodId query_period(Timestamp t) const {
    return locate_period(std::clamp(static_cast<double>(t), time_.t_min, time_.t_max), time_);
  }
  PointMeters query_point(double lat, double lng) const { return grid_point_meters(lat, lng, grid_); }

 private:
  GridSpec grid_;
  TimeSpec time_;
  std::vector<UserProfile> profiles_;
  std::unordered_map<AccountId, std::size_t> index_;
};

namespace detail {

inline UserProfile build_profile(const AccountRecordSet& account, const GridSpec& grid, const TimeSpec& time,
                                 const DpParams& dp) {
  const auto rep = build_representation(account, grid, time);
  std::vector<CellId> cells;
  for (const auto& e : rep.joint.entries) cells.push_back(e.cell);
  const auto assignment = cluster_cells(cells, grid, dp);

  // Clusters, plus unclustered cells that the outlier filter would keep.
  std::map<std::int64_t, std::vector<std::size_t>> groups;
  std::int64_t next_single = static_cast<std::int64_t>(assignment.centers.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (assignment.labels[i] != kNoCluster)
      groups[assignment.labels[i]].push_back(i);
    else if (rep.joint.entries[i].probability >= dp.varpi_threshold)
      groups[next_single++].push_back(i);
  }
  if (groups.empty()) {
    for (std::size_t i = 0; i < cells.size(); ++i) groups[0].push_back(i);
  }

  UserProfile profile;
  profile.account_id = account.account_id;
  profile.record_count = account.size();
  for (const auto& [label, members] : groups) {
    Region region;
    for (std::size_t i : members) {
      region.cells.push_back(rep.joint.entries[i].cell);
      region.centers.push_back(cell_center_meters(rep.joint.entries[i].cell, grid));
    }
    profile.regions.push_back(std::move(region));
  }
  // Regions ordered by their smallest cell so region ids are stable.
  std::sort(profile.regions.begin(), profile.regions.end(),
            [](const Region& a, const Region& b) { return a.cells.front() < b.cells.front(); });
  std::unordered_map<CellId, std::size_t> region_of;
  for (std::size_t r = 0; r < profile.regions.size(); ++r) {
    profile.regions[r].id = r;
    for (CellId c : profile.regions[r].cells) region_of.emplace(c, r);
  }
  std::size_t in_regions = 0;
  for (const auto& rec : account.records) {
    auto [cell, period] = locate(rec, grid, time);
    auto it = region_of.find(cell);
    if (it == region_of.end()) continue;
    auto& region = profile.regions[it->second];
    ++region.record_count;
    ++region.period_counts[period];
    ++in_regions;
  }
  for (auto& region : profile.regions)
    region.share = static_cast<double>(region.record_count) / static_cast<double>(in_regions);
  return profile;
}

}  // namespace detail

inline ProfileSet build_profiles(const Dataset& accounts, const GridSpec& grid, const TimeSpec& time,
                                 const DpParams& dp, unsigned threads = 0) {
  if (accounts.empty()) throw Error("profiles need at least one account");
  dp.validate();
  std::vector<UserProfile> profiles(accounts.size());
  parallel_for(accounts.size(), threads, [&](std::size_t i) {
    profiles[i] = detail::build_profile(accounts.accounts()[i], grid, time, dp);
  });
  const double total = static_cast<double>(accounts.record_count());
  for (auto& p : profiles) p.prior = static_cast<double>(p.record_count) / total;
  return ProfileSet(grid, time, std::move(profiles));
}

struct RankedAccount {
  AccountId account_id;
  double probability = 0.0;
};

struct RankedRegion {
  std::size_t region = 0;
  double probability = 0.0;
};

// p(u | l, t) for every profiled account, best first; ties by account id.
inline std::vector<RankedAccount> predict_user(double lat, double lng, Timestamp t, const ProfileSet& set) {
  if (set.profiles().empty()) throw Error("no profiles to rank");
  const CellId cell = set.query_cell(lat, lng);
  const PeriodId period = set.query_period(t);
  const PointMeters where = set.query_point(lat, lng);
  std::vector<RankedAccount> out;
  out.reserve(set.profiles().size());
  double norm = 0.0;
  for (const auto& p : set.profiles()) {
    const Region& region = p.resolve(cell, where);
    const double joint = p.prior * region.share * region.time_probability(period);
    out.push_back({p.account_id, joint});
    norm += joint;
  }
  for (auto& r : out) r.probability = norm > 0.0 ? r.probability / norm : 1.0 / static_cast<double>(out.size());
  std::sort(out.begin(), out.end(), [](const RankedAccount& a, const RankedAccount& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.account_id < b.account_id;
  });
  return out;
}

// p(l | u, t) over the account's regions, best first; ties by region id.
inline std::vector<RankedRegion> predict_location(const AccountId& account, Timestamp t, const ProfileSet& set) {
  const UserProfile& p = set.at(account);
  const PeriodId period = set.query_period(t);
  std::vector<RankedRegion> out;
  double norm = 0.0;
  for (const auto& r : p.regions) {
    const double joint = p.prior * r.share * r.time_probability(period);
    out.push_back({r.id, joint});
    norm += joint;
  }
  for (auto& r : out) r.probability /= norm;
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedRegion& a, const RankedRegion& b) { return a.probability > b.probability; });
  return out;
}

// Most frequent period in the resolved region; ties go to the lowest period.
inline PeriodId predict_time(const AccountId& account, double lat, double lng, const ProfileSet& set) {
  const UserProfile& p = set.at(account);
  const Region& region = p.resolve(set.query_cell(lat, lng), set.query_point(lat, lng));
  PeriodId best = 0;
  std::size_t best_count = 0;
  for (const auto& [period, count] : region.period_counts) {
    if (count > best_count) {
      best = period;
      best_count = count;
    }
  }
  return best;
}

// Per account, the earliest ceil(train_fraction * n) records train and the rest test.
inline std::pair<Dataset, Dataset> temporal_split(const Dataset& ds, double train_fraction = 0.8) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw Error("train fraction must lie in (0, 1]");
  Dataset train(ds.platform_label()), test(ds.platform_label());
  for (const auto& account : ds.accounts()) {
    auto records = account.records;
    std::stable_sort(records.begin(), records.end(),
                     [](const CheckIn& a, const CheckIn& b) { return a.timestamp < b.timestamp; });
    const auto cut = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(records.size())));
    AccountRecordSet tr{account.account_id, {records.begin(), records.begin() + static_cast<std::ptrdiff_t>(cut)}};
    AccountRecordSet te{account.account_id, {records.begin() + static_cast<std::ptrdiff_t>(cut), records.end()}};
    train.add_account(std::move(tr));
    if (!te.records.empty()) test.add_account(std::move(te));
  }
  return {std::move(train), std::move(test)};
}

}  // namespace geolink
