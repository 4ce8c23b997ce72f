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

#include <algorithm>
#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/index.hpp"
#include "geolink/parallel.hpp"

namespace geolink {

// sum over shared cells of min(p1(g), p2(g)); 1 for identical representations.
inline double overlap_score(const SpatioTemporalRepresentation& a, const SpatioTemporalRepresentation& b) {
  double sum = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->cell < ib->cell) {
      ++ia;
    } else if (ib->cell < ia->cell) {
      ++ib;
    } else {
      sum += std::min(ia->probability, ib->probability);
      ++ia;
      ++ib;
    }
  }
  return sum;
}

// cell -> accounts of the right-hand platform occupying it.
class InvertedIndex {
 public:
  struct Posting {
    std::size_t account = 0;  // position in the indexed span
    double probability = 0.0;
  };

  explicit InvertedIndex(std::span<const SpatioTemporalRepresentation> accounts) {
    for (std::size_t j = 0; j < accounts.size(); ++j) {
      for (const auto& e : accounts[j].entries)
        if (e.probability > 0.0) postings_[e.cell].push_back({j, e.probability});
    }
  }

  std::span<const Posting> lookup(CellId cell) const {
    auto it = postings_.find(cell);
    if (it == postings_.end()) return {};
    return it->second;
  }

  std::size_t cell_count() const { return postings_.size(); }

 private:
  std::unordered_map<CellId, std::vector<Posting>> postings_;
};

struct Candidate {
  std::size_t left = 0;   // position in U1
  std::size_t right = 0;  // position in U2
  double overlap = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// At most k entries per left account, grouped by left account, best first.
struct CandidateSet {
  std::vector<Candidate> pairs;
  std::size_t size() const { return pairs.size(); }
};

// For each left account, the k right accounts with the largest overlap among
// those sharing at least one cell. Ties go to the smaller right-hand id.
inline CandidateSet retrieve_candidates(std::span<const SpatioTemporalRepresentation> left,
                                        std::span<const SpatioTemporalRepresentation> right,
                                        std::span<const AccountId> right_ids, std::size_t k, unsigned threads = 0) {
  if (k < 1) throw Error("candidate count k must be >= 1");
  if (right_ids.size() != right.size()) throw Error("right-hand ids and representations differ in length");
  const InvertedIndex index(right);
  std::vector<std::vector<Candidate>> per_left(left.size());
  parallel_for(left.size(), threads, [&](std::size_t i) {
    std::unordered_map<std::size_t, double> overlap;
    for (const auto& e : left[i].entries) {
      for (const auto& post : index.lookup(e.cell)) overlap[post.account] += std::min(e.probability, post.probability);
    }
    std::vector<Candidate> list;
    list.reserve(overlap.size());
    for (const auto& [j, score] : overlap) list.push_back({i, j, score});
    auto better = [&](const Candidate& a, const Candidate& b) {
      if (a.overlap != b.overlap) return a.overlap > b.overlap;
      return right_ids[a.right] < right_ids[b.right];
    };
    const std::size_t keep = std::min(k, list.size());
    std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(keep), list.end(), better);
    list.resize(keep);
    per_left[i] = std::move(list);
  });
  CandidateSet out;
  for (auto& list : per_left) out.pairs.insert(out.pairs.end(), list.begin(), list.end());
  return out;
}

// Every left x right pair, for the unpruned variants.
inline CandidateSet all_pairs(std::size_t left, std::size_t right) {
  CandidateSet out;
  out.pairs.reserve(left * right);
  for (std::size_t i = 0; i < left; ++i)
    for (std::size_t j = 0; j < right; ++j) out.pairs.push_back({i, j, 0.0});
  return out;
}

}  // namespace geolink
