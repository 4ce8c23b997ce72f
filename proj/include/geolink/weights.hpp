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

// Renyi-entropy discriminativeness weights for grid cells and time periods.
//
// For a cell g visited by accounts u_1..u_N with per-account visit shares
// p_i = records of u_i in g / records of u_i, the raw weight is
//
//   w(g) = exp(-H_q(g)) = (sum_i p_i^q)^(1 / (q - 1)),
//
// and the table stores w(g) / max_g w(g). Periods are weighted the same way.
// With q < 1 a cell shared by many accounts gets a smaller weight.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/index.hpp"

namespace geolink {

// Shannon entropy of the proportions after renormalizing them to sum to 1.
inline double shannon_entropy(std::span<const double> proportions) {
  if (proportions.empty()) throw Error("entropy of an empty proportion set");
  double total = 0.0;
  for (double p : proportions) total += p;
  double h = 0.0;
  for (double p : proportions) {
    double r = p / total;
    if (r > 0.0) h -= r * std::log(r);
  }
  return h;
}

// H_q = log(sum p^q) / (1 - q), natural log. q == 1 uses the Shannon limit.
inline double renyi_entropy(std::span<const double> proportions, double q) {
  if (!(q > 0.0)) throw Error("Renyi order q must be > 0");
  if (proportions.empty()) throw Error("entropy of an empty proportion set");
  if (q == 1.0) return shannon_entropy(proportions);
  double sum = 0.0;
  for (double p : proportions) {
    if (!(p > 0.0) || p > 1.0) throw Error("proportions must lie in (0, 1]");
    sum += std::pow(p, q);
  }
  return std::log(sum) / (1.0 - q);
}

inline double raw_weight(std::span<const double> proportions, double q) {
  return std::exp(-renyi_entropy(proportions, q));
}

class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(std::unordered_map<CellId, double> grid, std::unordered_map<PeriodId, double> periods, double q)
      : grid_(std::move(grid)), periods_(std::move(periods)), q_(q) {}

  double q() const { return q_; }
  const std::unordered_map<CellId, double>& grid_weights() const { return grid_; }
  const std::unordered_map<PeriodId, double>& period_weights() const { return periods_; }

  double cell(CellId c) const {
    auto it = grid_.find(c);
    if (it == grid_.end()) throw Error("no weight for cell " + std::to_string(c));
    return it->second;
  }

  double period(PeriodId p) const {
    auto it = periods_.find(p);
    if (it == periods_.end()) throw Error("no weight for period " + std::to_string(p));
    return it->second;
  }

  friend bool operator==(const WeightTable&, const WeightTable&) = default;

 private:
  std::unordered_map<CellId, double> grid_;
  std::unordered_map<PeriodId, double> periods_;
  double q_ = 1.0;
};

namespace detail {

template <typename Key>
std::unordered_map<Key, double> normalized_weights(const std::map<Key, std::vector<double>>& shares, double q) {
  std::unordered_map<Key, double> out;
  out.reserve(shares.size());
  double max_w = 0.0;
  for (const auto& [key, props] : shares) {
    double w = raw_weight(props, q);
    out.emplace(key, w);
    max_w = std::max(max_w, w);
  }
  for (auto& [key, w] : out) w /= max_w;
  return out;
}

}  // namespace detail

// Pools the visit shares of every account given (both platforms) per cell and
// per period. Shares are collected in key order so the result is independent
// of account order up to floating-point summation order inside a key.
inline WeightTable build_weight_table(std::span<const std::span<const AccountRepresentation>> corpora, double q) {
  if (!(q > 0.0)) throw Error("Renyi order q must be > 0");
  std::map<CellId, std::vector<double>> cell_shares;
  std::map<PeriodId, std::vector<double>> period_shares;
  std::size_t accounts = 0;
  for (auto corpus : corpora) {
    for (const auto& rep : corpus) {
      ++accounts;
      for (const auto& e : rep.grid.entries) cell_shares[e.cell].push_back(e.probability);
      for (const auto& e : rep.time.entries) period_shares[e.period].push_back(e.probability);
    }
  }
  if (accounts == 0) throw Error("weight table needs at least one account");
  // Sorting makes the power sum order-independent.
  for (auto& [k, v] : cell_shares) std::sort(v.begin(), v.end());
  for (auto& [k, v] : period_shares) std::sort(v.begin(), v.end());
  return WeightTable(detail::normalized_weights(cell_shares, q), detail::normalized_weights(period_shares, q), q);
}

inline WeightTable build_weight_table(std::span<const AccountRepresentation> first,
                                      std::span<const AccountRepresentation> second, double q) {
  std::span<const AccountRepresentation> both[] = {first, second};
  return build_weight_table(std::span<const std::span<const AccountRepresentation>>(both), q);
}

// --- Cache file --------------------------------------------------------------
//
// Text format:
//   geolink-weights v1
//   key <dataset_hash> <d> <M> <q>
//   cells <n>
//   <cell_id> <weight>           (n lines)
//   periods <m>
//   <period_id> <weight>         (m lines)

struct WeightCacheKey {
  std::uint64_t dataset_hash = 0;
  std::int64_t d = 0;
  std::int32_t periods = 0;
  double q = 0.0;

  friend bool operator==(const WeightCacheKey&, const WeightCacheKey&) = default;
};

// FNV-1a over every record of the given datasets, in order.
inline std::uint64_t dataset_hash(std::initializer_list<const Dataset*> datasets) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    auto bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const Dataset* ds : datasets) {
    for (const auto& account : ds->accounts()) {
      mix(account.account_id.data(), account.account_id.size());
      for (const auto& r : account.records) {
        mix(&r.lat, sizeof r.lat);
        mix(&r.lng, sizeof r.lng);
        mix(&r.timestamp, sizeof r.timestamp);
      }
    }
    mix("|", 1);
  }
  return h;
}

inline void save_weight_table(std::ostream& out, const WeightTable& table, const WeightCacheKey& key) {
  out << "geolink-weights v1\n";
  out << "key " << key.dataset_hash << ' ' << key.d << ' ' << key.periods << ' ' << std::setprecision(17) << key.q
      << '\n';
  std::map<CellId, double> cells(table.grid_weights().begin(), table.grid_weights().end());
  std::map<PeriodId, double> periods(table.period_weights().begin(), table.period_weights().end());
  out << "cells " << cells.size() << '\n';
  for (const auto& [c, w] : cells) out << c << ' ' << std::setprecision(17) << w << '\n';
  out << "periods " << periods.size() << '\n';
  for (const auto& [p, w] : periods) out << p << ' ' << std::setprecision(17) << w << '\n';
}

// Returns nullopt when the stream is not a cache for `expected`.
inline std::optional<WeightTable> load_weight_table(std::istream& in, const WeightCacheKey& expected) {
  std::string magic, version, tag;
  if (!(in >> magic >> version) || magic != "geolink-weights" || version != "v1") return std::nullopt;
  WeightCacheKey key;
  if (!(in >> tag >> key.dataset_hash >> key.d >> key.periods >> key.q) || tag != "key") return std::nullopt;
  if (!(key == expected)) return std::nullopt;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "cells") return std::nullopt;
  std::unordered_map<CellId, double> cells;
  for (std::size_t i = 0; i < n; ++i) {
    CellId c;
    double w;
    if (!(in >> c >> w)) return std::nullopt;
    cells.emplace(c, w);
  }
  if (!(in >> tag >> n) || tag != "periods") return std::nullopt;
  std::unordered_map<PeriodId, double> periods;
  for (std::size_t i = 0; i < n; ++i) {
    PeriodId p;
    double w;
    if (!(in >> p >> w)) return std::nullopt;
    periods.emplace(p, w);
  }
  return WeightTable(std::move(cells), std::move(periods), key.q);
}

}  // namespace geolink
