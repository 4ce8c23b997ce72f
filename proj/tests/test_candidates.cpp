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

#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

namespace geolink {
namespace {

using testing::account_in_cells;

TEST(Overlap, FourCellExample) {
  GridSpec g = testing::unit_degree_grid(10);
  auto u1 = build_representation(account_in_cells("u1", {2, 73, 88, 88, 38}, g), g, testing::single_period());
  auto u2 = build_representation(account_in_cells("u2", {24, 73, 78, 78, 38}, g), g, testing::single_period());
  EXPECT_NEAR(overlap_score(u1.joint, u2.joint), 0.4, 1e-15);
  EXPECT_NEAR(overlap_score(u1.joint, u1.joint), 1.0, 1e-15);
  EXPECT_EQ(overlap_score(u1.joint, u2.joint), overlap_score(u2.joint, u1.joint));
}

class RetrievalTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<CellId> cell(0, 63);
    std::uniform_int_distribution<int> len(1, 12);
    for (auto* side : {&left_, &right_}) {
      for (int i = 0; i < 50; ++i) {
        std::vector<CellId> cells;
        for (int k = len(rng); k > 0; --k) cells.push_back(cell(rng));
        side->push_back(build_representation(account_in_cells("a", cells, g_), g_, testing::single_period()).joint);
      }
    }
    for (int i = 0; i < 50; ++i) ids_.push_back("r" + std::to_string(100 + i));
  }
  GridSpec g_ = testing::unit_degree_grid(8);
  std::vector<SpatioTemporalRepresentation> left_, right_;
  std::vector<AccountId> ids_;
};

TEST_F(RetrievalTest, MatchesBruteForceTopK) {
  for (std::size_t k : {1u, 3u, 5u, 60u}) {
    const auto got = retrieve_candidates(left_, right_, ids_, k, 2);
    EXPECT_LE(got.size(), left_.size() * k);
    for (std::size_t i = 0; i < left_.size(); ++i) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t j = 0; j < right_.size(); ++j) {
        std::map<CellId, double> a, b;
        for (const auto& e : left_[i].entries) a[e.cell] = e.probability;
        for (const auto& e : right_[j].entries) b[e.cell] = e.probability;
        double s = 0;
        for (auto [c, p] : a)
          if (b.count(c)) s += std::min(p, b[c]);
        if (s > 0) all.push_back({-s, j});
      }
      std::sort(all.begin(), all.end());
      all.resize(std::min(all.size(), k));
      std::vector<Candidate> mine;
      for (const auto& c : got.pairs)
        if (c.left == i) mine.push_back(c);
      ASSERT_EQ(mine.size(), all.size());
      for (std::size_t r = 0; r < all.size(); ++r) {
        EXPECT_EQ(mine[r].right, all[r].second);
        EXPECT_NEAR(mine[r].overlap, -all[r].first, 1e-12);
      }
    }
  }
}

TEST_F(RetrievalTest, SubsetOfExhaustive) {
  const auto pruned = retrieve_candidates(left_, right_, ids_, 4, 1);
  const auto all = all_pairs(left_.size(), right_.size());
  EXPECT_EQ(all.size(), left_.size() * right_.size());
  for (const auto& c : pruned.pairs) {
    EXPECT_LT(c.left, left_.size());
    EXPECT_LT(c.right, right_.size());
  }
}

TEST(Retrieval, TiesGoToSmallerRightId) {
  GridSpec g = testing::unit_degree_grid(3);
  std::vector<SpatioTemporalRepresentation> left{
      build_representation(account_in_cells("l", {1}, g), g, testing::single_period()).joint};
  std::vector<SpatioTemporalRepresentation> right(
      3, build_representation(account_in_cells("r", {1}, g), g, testing::single_period()).joint);
  const std::vector<AccountId> ids{"z", "b", "m"};
  const auto c = retrieve_candidates(left, right, ids, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.pairs[0].right, 1u);
  EXPECT_EQ(c.pairs[1].right, 2u);
}

TEST(Retrieval, RejectsBadArguments) {
  std::vector<SpatioTemporalRepresentation> none;
  std::vector<AccountId> ids;
  EXPECT_THROW(retrieve_candidates(none, none, ids, 0), Error);
  std::vector<AccountId> one{"x"};
  EXPECT_THROW(retrieve_candidates(none, none, one, 1), Error);
}

TEST(InvertedIndexTest, PostingsPerCell) {
  GridSpec g = testing::unit_degree_grid(3);
  std::vector<SpatioTemporalRepresentation> reps{
      build_representation(account_in_cells("a", {1, 2}, g), g, testing::single_period()).joint,
      build_representation(account_in_cells("b", {2}, g), g, testing::single_period()).joint};
  InvertedIndex idx(reps);
  EXPECT_EQ(idx.cell_count(), 2u);
  EXPECT_EQ(idx.lookup(2).size(), 2u);
  EXPECT_EQ(idx.lookup(1).size(), 1u);
  EXPECT_TRUE(idx.lookup(0).empty());
}

}  // namespace
}  // namespace geolink
