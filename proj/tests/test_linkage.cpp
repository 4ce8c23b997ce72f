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

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

namespace geolink {
namespace {

Dataset small_corpus(std::uint64_t seed, std::size_t accounts = 30) {
  CorpusParams cp;
  cp.accounts = accounts;
  cp.records_min = 40;
  cp.records_max = 80;
  cp.gen.seed = seed;
  return generate_corpus(cp);
}

std::set<std::pair<AccountId, AccountId>> pair_set(const LinkOutput& out) {
  std::set<std::pair<AccountId, AccountId>> s;
  for (const auto& p : out.pairs) s.emplace(p.left, p.right);
  return s;
}

TEST(Link, ExactCopySelfMatches) {
  Dataset ds = small_corpus(1);
  LinkConfig cfg;
  cfg.s_delta = 0.0;
  cfg.threads = 2;
  const auto out = link_accounts(ds, ds, cfg);
  const auto m = evaluate(out.pairs, identity_truth(ds));
  EXPECT_EQ(m.correct, ds.size());
  EXPECT_EQ(m.returned, ds.size());
  EXPECT_DOUBLE_EQ(m.f1, 1.0);
}

TEST(Link, ThresholdAboveMaximumEmptiesOutput) {
  Dataset ds = small_corpus(2);
  LinkConfig cfg;
  cfg.s_delta = 1e9;
  EXPECT_TRUE(link_accounts(ds, ds, cfg).pairs.empty());
}

TEST(Link, OutputShrinksAsThresholdGrows) {
  Dataset ds = small_corpus(3);
  auto [a, b] = split_dataset(ds, 5);
  LinkConfig cfg;
  cfg.stages.pruning = false;
  cfg.stages.weights = false;
  cfg.s_delta = 0.0;
  auto base = link_accounts(a, b, cfg);
  const auto base_set = pair_set(base);
  std::vector<double> scores;
  for (const auto& p : base.pairs) scores.push_back(p.score);
  std::sort(scores.begin(), scores.end());
  std::size_t prev = base.pairs.size();
  for (std::size_t q = 1; q < 10; ++q) {
    cfg.s_delta = scores[q * scores.size() / 10];
    auto out = link_accounts(a, b, cfg);
    EXPECT_LE(out.pairs.size(), prev);
    const auto s = pair_set(out);
    EXPECT_TRUE(std::includes(base_set.begin(), base_set.end(), s.begin(), s.end()));
    prev = out.pairs.size();
  }
}

TEST(Link, PrunedOutputIsSubsetOfExhaustive) {
  Dataset ds = small_corpus(4);
  auto [a, b] = split_dataset(ds, 6);
  LinkConfig cfg;
  cfg.s_delta = 0.0;
  std::size_t prev = 0;
  std::set<std::pair<AccountId, AccountId>> prev_set;
  for (std::size_t k : {1u, 2u, 5u, 30u}) {
    cfg.k = k;
    auto out = link_accounts(a, b, cfg);
    auto s = pair_set(out);
    EXPECT_LE(out.candidates_scored, a.size() * k);
    EXPECT_GE(s.size(), prev);
    EXPECT_TRUE(std::includes(s.begin(), s.end(), prev_set.begin(), prev_set.end()));
    prev = s.size();
    prev_set = s;
  }
  cfg.stages.pruning = false;
  auto full = pair_set(link_accounts(a, b, cfg));
  EXPECT_TRUE(std::includes(full.begin(), full.end(), prev_set.begin(), prev_set.end()));
}

TEST(Link, KernelCountersScaleWithCandidates) {
  Dataset ds = small_corpus(5, 20);
  auto [a, b] = split_dataset(ds, 7);
  LinkConfig cfg;
  cfg.stages.pruning = false;
  auto all = link_accounts(a, b, cfg);
  EXPECT_EQ(all.candidates_scored, 400u);
  cfg.stages.pruning = true;
  auto pruned = link_accounts(a, b, cfg);
  EXPECT_LE(pruned.candidates_scored, 20u);
  EXPECT_LT(pruned.kernel_evaluations.total(), all.kernel_evaluations.total());
}

TEST(Link, RemovedCellsAreReported) {
  Dataset ds = small_corpus(6, 10);
  LinkConfig cfg;
  cfg.cutoff_m = 1e-3;
  cfg.xi_threshold = 1e12;
  cfg.varpi_threshold = 0.05;
  auto out = link_accounts(ds, ds, cfg);
  std::map<AccountId, std::vector<CellId>> reported;
  for (const auto& r : out.removed_left) reported[r.account] = r.cells;
  auto reps = build_representations(ds, out.grid, out.time, 1);
  std::size_t total = 0;
  for (const auto& rep : reps) {
    auto expect = detect_outliers(rep.joint, out.grid, out.dp).removed;
    EXPECT_EQ(reported[rep.account_id], expect);
    total += expect.size();
  }
  EXPECT_GT(total, 0u);
  EXPECT_EQ(out.removed_right.size(), out.removed_left.size());
}

TEST(Link, RejectsInvalidConfig) {
  Dataset ds = small_corpus(7, 3);
  LinkConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(link_accounts(ds, ds, cfg), Error);
  cfg = {};
  cfg.q = 0.0;
  EXPECT_THROW(link_accounts(ds, ds, cfg), Error);
  cfg = {};
  cfg.cutoff_m = -1.0;
  EXPECT_THROW(link_accounts(ds, ds, cfg), Error);
  EXPECT_THROW(link_accounts(Dataset("e"), ds, LinkConfig{}), Error);
}

TEST(Variants, Stages) {
  EXPECT_EQ(stages_for(Variant::kS1), (Stages{false, false, false}));
  EXPECT_EQ(stages_for(Variant::kS2), (Stages{true, false, false}));
  EXPECT_EQ(stages_for(Variant::kS3), (Stages{true, true, false}));
  EXPECT_EQ(stages_for(Variant::kFull), (Stages{true, true, true}));
  for (auto v : {Variant::kS1, Variant::kS2, Variant::kS3, Variant::kFull})
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("S4"), Error);
}

TEST(Metrics, FormulaSubstitution) {
  auto r = metrics_from_counts(8, 10, 16);
  EXPECT_DOUBLE_EQ(r.recall, 0.8);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 8.0 / 13.0);
  auto z = metrics_from_counts(0, 5, 0);
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.f1, 0.0);
  EXPECT_THROW(metrics_from_counts(1, 0, 1), Error);
  EXPECT_THROW(metrics_from_counts(3, 2, 5), Error);
  EXPECT_THROW(metrics_from_counts(3, 5, 2), Error);
}

TEST(Metrics, EvaluateCountsDistinctPairs) {
  GroundTruth t;
  t.insert("a", "x");
  t.insert("b", "y");
  std::vector<ScoredPair> pairs{{"a", "x", 1}, {"a", "x", 2}, {"b", "z", 1}};
  auto r = evaluate(pairs, t);
  EXPECT_EQ(r.correct, 1u);
  EXPECT_EQ(r.returned, 2u);
  EXPECT_EQ(r.truth, 2u);
  EXPECT_GE(r.f1, std::min(r.precision, r.recall));
  EXPECT_LE(r.f1, std::max(r.precision, r.recall));
  EXPECT_THROW(evaluate(pairs, GroundTruth{}), Error);
}

}  // namespace
}  // namespace geolink
