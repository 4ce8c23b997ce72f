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

// Seeded synthetic check-ins: Gaussian records around a few per-account
// centers, noise injection, and per-account random halving.
//
// Every account draws from its own generator seeded by (seed, account id,
// stream tag), so output does not depend on processing order.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/index.hpp"
#include "geolink/model.hpp"

namespace geolink {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key, std::uint64_t stream = 0) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return splitmix64(splitmix64(seed ^ h) ^ stream);
}

// Bounding region every generated record must fall into.
struct Extent {
  double min_lat = -90.0;
  double max_lat = 90.0;
  double min_lng = -180.0;
  double max_lng = 180.0;
  double t_min = 0.0;
  double t_max = 1.0;

  static Extent of(const GridSpec& grid, const TimeSpec& time) {
    return {grid.min_lat, grid.max_lat, grid.min_lng, grid.max_lng, time.t_min, time.t_max};
  }
};

inline constexpr int kMaxResampleAttempts = 100;

struct GenParams {
  int centers_min = 2;
  int centers_max = 10;
  double sigma_space_deg = 0.01;
  double sigma_time = 30.0;        // generator time units
  double time_unit_seconds = 1.0;  // seconds per generator time unit
  std::uint64_t seed = 1;

  double sigma_time_seconds() const { return sigma_time * time_unit_seconds; }

  // Six temporal sigmas span five periods of the given partition.
  void fit_time_unit(const TimeSpec& time) { time_unit_seconds = 5.0 * time.period_width() / (6.0 * sigma_time); }

  void validate() const {
    if (centers_min < 1 || centers_max < centers_min) throw Error("center count range must satisfy 1 <= min <= max");
    if (!(sigma_space_deg > 0.0) || !(sigma_time > 0.0) || !(time_unit_seconds > 0.0))
      throw Error("generator sigmas must be > 0");
  }
};

namespace detail {

// Gaussian sample around a center, resampled until inside the extent and
// clamped after kMaxResampleAttempts failures.
inline CheckIn sample_around(const CheckIn& center, const AccountId& owner, const GenParams& p, const Extent& ext,
                             std::mt19937_64& rng) {
  std::normal_distribution<double> space(0.0, p.sigma_space_deg);
  std::normal_distribution<double> time(0.0, p.sigma_time_seconds());
  CheckIn out{owner, center.lat, center.lng, center.timestamp};
  bool placed = false;
  for (int attempt = 0; attempt < kMaxResampleAttempts && !placed; ++attempt) {
    double lat = center.lat + space(rng);
    double lng = center.lng + space(rng);
    if (lat >= ext.min_lat && lat <= ext.max_lat && lng >= ext.min_lng && lng <= ext.max_lng) {
      out.lat = lat;
      out.lng = lng;
      placed = true;
    } else if (attempt + 1 == kMaxResampleAttempts) {
      out.lat = std::clamp(lat, ext.min_lat, ext.max_lat);
      out.lng = std::clamp(lng, ext.min_lng, ext.max_lng);
    }
  }
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    double t = std::round(static_cast<double>(center.timestamp) + time(rng));
    if ((t >= ext.t_min && t <= ext.t_max) || attempt + 1 == kMaxResampleAttempts) {
      out.timestamp = static_cast<Timestamp>(std::clamp(t, std::ceil(ext.t_min), std::floor(ext.t_max)));
      break;
    }
  }
  return out;
}

inline std::vector<CheckIn> pick_centers(const AccountRecordSet& account, const GenParams& p, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count_dist(p.centers_min, p.centers_max);
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(count_dist(rng)), account.size());
  std::vector<std::size_t> idx(account.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<CheckIn> centers;
  centers.reserve(want);
  for (std::size_t i = 0; i < want; ++i) centers.push_back(account.records[idx[i]]);
  return centers;
}

inline AccountRecordSet synthesize_like(const AccountRecordSet& source, const AccountId& new_id, const GenParams& p,
                                        const Extent& ext, std::mt19937_64& rng) {
  const auto centers = pick_centers(source, p, rng);
  std::uniform_int_distribution<std::size_t> which(0, centers.size() - 1);
  AccountRecordSet out{new_id, {}};
  out.records.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) out.records.push_back(sample_around(centers[which(rng)], new_id, p, ext, rng));
  return out;
}

inline void copy_into(Dataset& dst, const Dataset& src) {
  for (const auto& a : src.accounts()) dst.add_account(a);
}

}  // namespace detail

struct ScaledCorpus {
  Dataset left;
  Dataset right;
  GroundTruth truth;
};

// Appends `copies` synthetic linked pairs. Each copy picks a random truth pair
// and regenerates both accounts around 2..10 of their own records.
inline ScaledCorpus generate_scaled(const Dataset& base_left, const Dataset& base_right, const GroundTruth& truth,
                                    std::size_t copies, const GenParams& params, const Extent& extent) {
  params.validate();
  if (truth.empty()) throw Error("scaling needs a non-empty ground truth");
  std::vector<GroundTruth::Pair> usable;
  for (const auto& pair : truth.pairs())
    if (base_left.find(pair.first) && base_right.find(pair.second)) usable.push_back(pair);
  if (usable.empty() && copies > 0) throw Error("no ground-truth pair refers to accounts present in both datasets");

  ScaledCorpus out{Dataset(base_left.platform_label()), Dataset(base_right.platform_label()), truth};
  detail::copy_into(out.left, base_left);
  detail::copy_into(out.right, base_right);
  for (std::size_t c = 0; c < copies; ++c) {
    std::mt19937_64 pick_rng(derive_seed(params.seed, "copy", c));
    std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
    const auto& [id_a, id_b] = usable[pick(pick_rng)];
    const std::string suffix = "#syn" + std::to_string(c);
    AccountId new_a = id_a + suffix, new_b = id_b + suffix;
    std::mt19937_64 rng_a(derive_seed(params.seed, new_a, 1));
    std::mt19937_64 rng_b(derive_seed(params.seed, new_b, 2));
    out.left.add_account(detail::synthesize_like(*base_left.find(id_a), new_a, params, extent, rng_a));
    out.right.add_account(detail::synthesize_like(*base_right.find(id_b), new_b, params, extent, rng_b));
    out.truth.insert(std::move(new_a), std::move(new_b));
  }
  return out;
}

// Replaces floor(fraction * |R_u|) random records of every account with a
// Gaussian perturbation of the record it replaces.
inline Dataset inject_noise(const Dataset& ds, double fraction, const GenParams& params, const Extent& extent) {
  params.validate();
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("noise fraction must lie in [0, 1]");
  Dataset out(ds.platform_label());
  for (const auto& account : ds.accounts()) {
    AccountRecordSet copy = account;
    const auto n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(account.size())));
    if (n > 0) {
      std::mt19937_64 rng(derive_seed(params.seed, account.account_id, 3));
      std::vector<std::size_t> idx(account.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i = 0; i < n; ++i)
        copy.records[idx[i]] = detail::sample_around(account.records[idx[i]], account.account_id, params, extent, rng);
    }
    out.add_account(std::move(copy));
  }
  return out;
}

// Random halves of sizes ceil(n/2) and floor(n/2) per account; both halves keep
// the account id and the original record order.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::uint64_t seed) {
  Dataset a(ds.platform_label() + "A"), b(ds.platform_label() + "B");
  for (const auto& account : ds.accounts()) {
    if (account.size() < 2) throw Error("account '" + account.account_id + "' has fewer than 2 records to split");
    std::mt19937_64 rng(derive_seed(seed, account.account_id, 4));
    std::vector<std::size_t> idx(account.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t first = (account.size() + 1) / 2;
    std::vector<bool> in_first(account.size(), false);
    for (std::size_t i = 0; i < first; ++i) in_first[idx[i]] = true;
    AccountRecordSet pa{account.account_id, {}}, pb{account.account_id, {}};
    for (std::size_t i = 0; i < account.size(); ++i) (in_first[i] ? pa : pb).records.push_back(account.records[i]);
    a.add_account(std::move(pa));
    b.add_account(std::move(pb));
  }
  return {std::move(a), std::move(b)};
}

// --- Fresh corpora -------------------------------------------------------------

struct CorpusParams {
  std::size_t accounts = 200;
  std::size_t records_min = 200;
  std::size_t records_max = 400;
  Extent region{-60.0, 70.0, -180.0, 180.0, 1.5e9, 1.5e9 + 365.0 * 86400.0};
  std::int32_t periods = 2880;  // partition the generator's time sigma is fitted to
  GenParams gen;
};

// Accounts with 2..10 centers placed uniformly in the region and time span;
// each record is drawn around a uniformly chosen center.
inline Dataset generate_corpus(const CorpusParams& cp, std::string label = "synthetic") {
  if (cp.records_min < 1 || cp.records_max < cp.records_min) throw Error("record count range must satisfy 1 <= min <= max");
  GenParams gen = cp.gen;
  TimeSpec time{cp.region.t_min, cp.region.t_max, cp.periods};
  time.validate();
  gen.fit_time_unit(time);
  gen.validate();

  Dataset out(std::move(label));
  const int width = static_cast<int>(std::to_string(cp.accounts).size());
  for (std::size_t u = 0; u < cp.accounts; ++u) {
    std::string num = std::to_string(u);
    AccountId id = "u" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;
    std::mt19937_64 rng(derive_seed(gen.seed, id, 5));
    std::uniform_int_distribution<std::size_t> n_records(cp.records_min, cp.records_max);
    std::uniform_int_distribution<int> n_centers(gen.centers_min, gen.centers_max);
    std::uniform_real_distribution<double> lat(cp.region.min_lat, cp.region.max_lat);
    std::uniform_real_distribution<double> lng(cp.region.min_lng, cp.region.max_lng);
    std::uniform_real_distribution<double> t(cp.region.t_min, cp.region.t_max);
    const std::size_t n = n_records(rng);
    const int c = n_centers(rng);
    std::vector<CheckIn> centers;
    for (int i = 0; i < c; ++i) centers.push_back({id, lat(rng), lng(rng), static_cast<Timestamp>(std::round(t(rng)))});
    std::uniform_int_distribution<std::size_t> which(0, centers.size() - 1);
    AccountRecordSet account{id, {}};
    for (std::size_t i = 0; i < n; ++i)
      account.records.push_back(detail::sample_around(centers[which(rng)], id, gen, cp.region, rng));
    out.add_account(std::move(account));
  }
  return out;
}

}  // namespace geolink
