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

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geolink/error.hpp"

namespace geolink {

using AccountId = std::string;
using Timestamp = std::int64_t;  // epoch seconds, no timezone semantics

struct CheckIn {
  AccountId account_id;
  double lat = 0.0;
  double lng = 0.0;
  Timestamp timestamp = 0;

  friend bool operator==(const CheckIn&, const CheckIn&) = default;
  friend auto operator<=>(const CheckIn&, const CheckIn&) = default;
};

inline bool valid_latitude(double lat) { return std::isfinite(lat) && lat >= -90.0 && lat <= 90.0; }
inline bool valid_longitude(double lng) { return std::isfinite(lng) && lng >= -180.0 && lng <= 180.0; }

// All check-ins of one account, in input order.
struct AccountRecordSet {
  AccountId account_id;
  std::vector<CheckIn> records;

  std::size_t size() const { return records.size(); }
};

// One platform's accounts. Account ids are unique; accounts keep first-seen order.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::string platform_label) : label_(std::move(platform_label)) {}

  const std::string& platform_label() const { return label_; }
  void set_platform_label(std::string label) { label_ = std::move(label); }

  const std::vector<AccountRecordSet>& accounts() const { return accounts_; }
  std::size_t size() const { return accounts_.size(); }
  bool empty() const { return accounts_.empty(); }

  std::size_t record_count() const {
    std::size_t n = 0;
    for (const auto& a : accounts_) n += a.size();
    return n;
  }

  const AccountRecordSet* find(const AccountId& id) const {
    auto it = position_.find(id);
    return it == position_.end() ? nullptr : &accounts_[it->second];
  }

  // Appends a record, creating the account on first sight.
  void add(CheckIn record) {
    auto [it, inserted] = position_.try_emplace(record.account_id, accounts_.size());
    if (inserted) accounts_.push_back(AccountRecordSet{record.account_id, {}});
    accounts_[it->second].records.push_back(std::move(record));
  }

  // Adds a whole account. Throws if the id is already present or the set is empty.
  void add_account(AccountRecordSet account) {
    if (account.records.empty()) throw Error("account '" + account.account_id + "' has no records");
    for (const auto& r : account.records) {
      if (r.account_id != account.account_id)
        throw Error("record owned by '" + r.account_id + "' inside account '" + account.account_id + "'");
    }
    auto [it, inserted] = position_.try_emplace(account.account_id, accounts_.size());
    if (!inserted) throw Error("duplicate account id '" + account.account_id + "'");
    accounts_.push_back(std::move(account));
  }

 private:
  std::string label_;
  std::vector<AccountRecordSet> accounts_;
  std::unordered_map<AccountId, std::size_t> position_;
};

// Known cross-platform links. Many-to-many is allowed; ids need not exist in any dataset.
class GroundTruth {
 public:
  using Pair = std::pair<AccountId, AccountId>;

  bool insert(AccountId a, AccountId b) { return pairs_.emplace(std::move(a), std::move(b)).second; }
  bool contains(const AccountId& a, const AccountId& b) const { return pairs_.count({a, b}) > 0; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::set<Pair>& pairs() const { return pairs_; }

 private:
  std::set<Pair> pairs_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Skips blank lines; returns false at end of stream.
inline bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) return true;
  }
  return false;
}

}  // namespace detail

// Reads `account_id,lat,lng,epoch_seconds` lines. Bit-identical repeats of a record collapse.
inline Dataset ingest_checkins(std::istream& source, std::string platform_label) {
  Dataset ds(std::move(platform_label));
  std::set<std::tuple<std::string, double, double, Timestamp>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (detail::next_content_line(source, line, line_no)) {
    auto fields = detail::split_fields(line);
    if (fields.size() != 4) throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
    if (fields[0].empty()) throw ParseError("empty account id", line_no);
    auto lat = detail::parse_number<double>(fields[1]);
    if (!lat) throw ParseError("unparsable latitude '" + std::string(fields[1]) + "'", line_no);
    auto lng = detail::parse_number<double>(fields[2]);
    if (!lng) throw ParseError("unparsable longitude '" + std::string(fields[2]) + "'", line_no);
    auto ts = detail::parse_number<Timestamp>(fields[3]);
    if (!ts) throw ParseError("unparsable timestamp '" + std::string(fields[3]) + "'", line_no);
    if (!valid_latitude(*lat)) throw ParseError("latitude out of range", line_no);
    if (!valid_longitude(*lng)) throw ParseError("longitude out of range", line_no);

    CheckIn rec{std::string(fields[0]), *lat, *lng, *ts};
    if (!seen.emplace(rec.account_id, rec.lat, rec.lng, rec.timestamp).second) continue;
    ds.add(std::move(rec));
  }
  return ds;
}

inline GroundTruth ingest_ground_truth(std::istream& source) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (detail::next_content_line(source, line, line_no)) {
    auto fields = detail::split_fields(line);
    if (fields.size() != 2) throw ParseError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty account id", line_no);
    truth.insert(std::string(fields[0]), std::string(fields[1]));
  }
  return truth;
}

// Writes with round-trip precision so write -> ingest reproduces every value exactly.
inline void write_checkins(std::ostream& out, const Dataset& ds) {
  char buf[64];
  for (const auto& account : ds.accounts()) {
    for (const auto& r : account.records) {
      out << r.account_id << ',';
      auto [p1, e1] = std::to_chars(buf, buf + sizeof buf, r.lat);
      out.write(buf, p1 - buf) << ',';
      auto [p2, e2] = std::to_chars(buf, buf + sizeof buf, r.lng);
      out.write(buf, p2 - buf) << ',' << r.timestamp << '\n';
    }
  }
}

inline void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& [a, b] : truth.pairs()) out << a << ',' << b << '\n';
}

// Identity links for a dataset split into two halves that keep account ids.
inline GroundTruth identity_truth(const Dataset& ds) {
  GroundTruth truth;
  for (const auto& a : ds.accounts()) truth.insert(a.account_id, a.account_id);
  return truth;
}

}  // namespace geolink
