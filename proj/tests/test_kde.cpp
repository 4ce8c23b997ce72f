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

#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

namespace geolink {
namespace {

using testing::account_in_cells;
using testing::oracle_kernel;
using testing::unit_degree_grid;

TEST(Kernel, ZeroDistanceMaximum) {
  EXPECT_DOUBLE_EQ(gaussian_kernel(0.0, 60.0), 1.0 / (2.0 * std::numbers::pi * 60.0));
  EXPECT_DOUBLE_EQ(gaussian_kernel(2.0, 2.0), std::exp(-0.5) / (4.0 * std::numbers::pi));
  EXPECT_LT(gaussian_kernel(10.0, 1.0), 1e-20 * gaussian_kernel(0.0, 1.0));
  EXPECT_THROW(gaussian_kernel(1.0, 0.0), Error);
  EXPECT_EQ(gaussian_kernel(-1.0, 1.0), gaussian_kernel(1.0, 1.0));
}

TEST(Naive, IdenticalSingleRecords) {
  AccountRecordSet a{"a", {{"a", 10.0, 20.0, 500}}};
  auto s = naive_similarity(a, a, {60.0, 2.0}, {10.0, 1.0});
  EXPECT_DOUBLE_EQ(s.spatial, 1.0 / (2 * std::numbers::pi * 60.0));
  EXPECT_DOUBLE_EQ(s.temporal, 1.0 / (2 * std::numbers::pi * 2.0));
  EXPECT_DOUBLE_EQ(s.total, s.spatial + s.temporal);
}

TEST(Naive, HandPlacedMatchesOracle) {
  AccountRecordSet a{"a", {{"a", 0.0, 0.0, 0}, {"a", 0.0005, 0.0, 100}}};
  AccountRecordSet b{"b", {{"b", 0.0, 0.0004, 50}, {"b", 0.0003, 0.0003, 400}}};
  auto s = naive_similarity(a, b, {60.0, 1.5}, {0.0, 100.0});
  auto o = testing::oracle_naive(a, b, 60.0, 1.5, 0.0, 100.0);
  EXPECT_NEAR(s.spatial, o.spatial, 1e-12 * o.spatial);
  EXPECT_NEAR(s.temporal, o.temporal, 1e-12 * o.temporal);
}

TEST(Naive, SymmetricAndCounted) {
  std::mt19937_64 rng(4);
  auto a = testing::random_account("a", 17, rng, 30, 30, 0.01, 0, 10000);
  auto b = testing::random_account("b", 23, rng, 30, 30, 0.01, 0, 10000);
  KernelTally tally;
  auto ab = naive_similarity(a, b, {}, {30.0, 60.0}, &tally);
  auto ba = naive_similarity(b, a, {}, {30.0, 60.0});
  EXPECT_NEAR(ab.total, ba.total, 1e-15 * ab.total);
  EXPECT_EQ(tally.spatial, 17u * 23u);
  EXPECT_EQ(tally.temporal, 17u * 23u);
}

TEST(Naive, EmptyThrows) {
  AccountRecordSet a{"a", {{"a", 0, 0, 0}}}, e{"e", {}};
  EXPECT_THROW(naive_similarity(a, e, {}, {}), Error);
}

TEST(Indexed, OneSharedCellAndPeriodHitsKernelMaximum) {
  GridSpec g = unit_degree_grid(4);
  auto rep = build_representation(account_in_cells("u", {5, 5}, g), g, testing::single_period());
  auto s = indexed_similarity(rep, rep, g, testing::single_period(), {60.0, 1.0});
  EXPECT_DOUBLE_EQ(s.spatial, 1.0 / (2 * std::numbers::pi * 60.0));
  EXPECT_DOUBLE_EQ(s.temporal, 1.0 / (2 * std::numbers::pi));
}

// Sixteen cell pairs of the two four-cell accounts, summed by hand.
TEST(Indexed, FourCellExampleMatchesDoubleSum) {
  GridSpec g = testing::metric_grid(10, 50.0);
  auto u1 = build_representation(account_in_cells("u1", {2, 73, 88, 88, 38}, g), g, testing::single_period());
  auto u2 = build_representation(account_in_cells("u2", {24, 73, 78, 78, 38}, g), g, testing::single_period());
  const std::vector<std::pair<CellId, double>> g1{{2, .2}, {38, .2}, {73, .2}, {88, .4}};
  const std::vector<std::pair<CellId, double>> g2{{24, .2}, {38, .2}, {73, .2}, {78, .4}};
  double sum = 0;
  for (auto [c1, p1] : g1) {
    for (auto [c2, p2] : g2) {
      double dr = double(c1 / 10 - c2 / 10), dc = double(c1 % 10 - c2 % 10);
      sum += oracle_kernel(50.0 * std::sqrt(dr * dr + dc * dc), 60.0) * p1 * p2;
    }
  }
  auto s = indexed_similarity(u1, u2, g, testing::single_period(), {60.0, 1.0});
  EXPECT_NEAR(s.spatial, sum / 16.0, 1e-12 * sum);
  auto m = indexed_similarity(u1, u2, g, testing::single_period(), {60.0, 1.0}, CellNormalization::kMassOnly);
  EXPECT_NEAR(m.spatial, sum, 1e-12 * sum);
}

TEST(Indexed, MassOnlyIsPerCellPairTimesCounts) {
  std::mt19937_64 rng(8);
  auto ds = testing::dataset_of({testing::random_account("a", 40, rng, 0, 0, 0.01, 0, 5000),
                                 testing::random_account("b", 30, rng, 0, 0, 0.01, 0, 5000)});
  auto [g, t] = build_specs({&ds}, 20, 10);
  auto ra = build_representation(ds.accounts()[0], g, t), rb = build_representation(ds.accounts()[1], g, t);
  auto per = indexed_similarity(ra, rb, g, t, {500.0, 1.0});
  auto mass = indexed_similarity(ra, rb, g, t, {500.0, 1.0}, CellNormalization::kMassOnly);
  const double cells = double(ra.grid.entries.size() * rb.grid.entries.size());
  const double periods = double(ra.time.entries.size() * rb.time.entries.size());
  EXPECT_NEAR(per.spatial * cells, mass.spatial, 1e-12 * mass.spatial);
  EXPECT_NEAR(per.temporal * periods, mass.temporal, 1e-12 * mass.temporal);
}

TEST(Indexed, SingleRecordsWithinSnappingBound) {
  // |K(a) - K(b)| <= max|K'| * |a - b|, max|K'| = exp(-1/2) / (2 pi h^2).
  GridSpec g = testing::metric_grid(100, 5.0);
  const double h = 60.0;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    AccountRecordSet a{"a", {{"a", u(rng) * g.max_lat, u(rng) * g.max_lng, 0}}};
    AccountRecordSet b{"b", {{"b", u(rng) * g.max_lat, u(rng) * g.max_lng, 0}}};
    auto ra = build_representation(a, g, testing::single_period());
    auto rb = build_representation(b, g, testing::single_period());
    double naive = naive_similarity(a, b, {h, 1.0}, {0.0, 1.0}).spatial;
    double idx = indexed_similarity(ra, rb, g, testing::single_period(), {h, 1.0}).spatial;
    double bound = std::exp(-0.5) / (2 * std::numbers::pi * h * h) * g.cell_diagonal_meters();
    EXPECT_LE(std::abs(naive - idx), bound + 1e-15);
  }
}

TEST(Indexed, UpperBoundAndSymmetry) {
  std::mt19937_64 rng(12);
  auto ds = testing::dataset_of({testing::random_account("a", 60, rng, 0, 0, 0.005, 0, 5000),
                                 testing::random_account("b", 60, rng, 0, 0, 0.005, 0, 5000)});
  auto [g, t] = build_specs({&ds}, 40, 10);
  auto ra = build_representation(ds.accounts()[0], g, t), rb = build_representation(ds.accounts()[1], g, t);
  auto ab = indexed_similarity(ra, rb, g, t, {});
  auto ba = indexed_similarity(rb, ra, g, t, {});
  EXPECT_NEAR(ab.total, ba.total, 1e-15 * ab.total);
  EXPECT_LE(ab.spatial, 1.0 / (2 * std::numbers::pi * 60.0));
  EXPECT_LE(naive_similarity(ds.accounts()[0], ds.accounts()[1], {}, RecordMetric::from_specs(g, t)).spatial,
            1.0 / (2 * std::numbers::pi * 60.0));
}

// Direct transcription of the joint score for the oracle.
double oracle_joint(const SpatioTemporalRepresentation& a, const SpatioTemporalRepresentation& b,
                    const WeightTable* w, double alpha, double hs, double ht, const GridSpec& g) {
  double total = 0;
  for (const auto& x : a.entries) {
    for (const auto& y : b.entries) {
      const double wx = w ? w->cell(x.cell) : 1.0, wy = w ? w->cell(y.cell) : 1.0;
      const double dr = double(x.cell / g.d - y.cell / g.d) * g.cell_height() * 110574.0;
      const double dc = double(x.cell % g.d - y.cell % g.d) * g.cell_width() *
                        std::cos(g.ref_lat * std::numbers::pi / 180.0) * 111320.0;
      const double sf = oracle_kernel(std::sqrt(dr * dr + dc * dc), hs) * x.probability * y.probability * wx * wy;
      double tf = 0;
      for (const auto& p : x.periods)
        for (const auto& q : y.periods)
          tf += oracle_kernel(double(p.period - q.period), ht) * p.probability * q.probability *
                (w ? w->period(p.period) * w->period(q.period) : 1.0);
      total += std::pow(sf, alpha) * std::pow(tf, 1 - alpha);
    }
  }
  return total / double(a.size() * b.size());
}

class JointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(21);
    ds_ = testing::dataset_of({testing::random_account("a", 80, rng, 10, 10, 0.002, 0, 20000),
                               testing::random_account("b", 70, rng, 10, 10, 0.002, 0, 20000)});
    std::tie(g_, t_) = build_specs({&ds_}, 30, 12);
    ra_ = build_representation(ds_.accounts()[0], g_, t_);
    rb_ = build_representation(ds_.accounts()[1], g_, t_);
  }
  Dataset ds_{"x"};
  GridSpec g_;
  TimeSpec t_;
  AccountRepresentation ra_, rb_;
};

TEST_F(JointTest, MatchesOracleWithWeights) {
  std::vector<AccountRepresentation> both{ra_, rb_};
  WeightTable w = build_weight_table(both, {}, 0.4);
  for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
    double s = joint_weighted_similarity(ra_.joint, rb_.joint, &w, {alpha}, {60.0, 1.0}, g_, t_);
    double o = oracle_joint(ra_.joint, rb_.joint, &w, alpha, 60.0, 1.0, g_);
    EXPECT_NEAR(s, o, 1e-12 * o) << alpha;
  }
}

TEST_F(JointTest, SpatialOnlyEqualsIndexedSpatial) {
  double s = joint_weighted_similarity(ra_.joint, rb_.joint, nullptr, {1.0}, {60.0, 1.0}, g_, t_);
  EXPECT_NEAR(s, indexed_similarity(ra_, rb_, g_, t_, {60.0, 1.0}).spatial, 1e-12 * s);
}

TEST_F(JointTest, Symmetric) {
  std::vector<AccountRepresentation> both{ra_, rb_};
  WeightTable w = build_weight_table(both, {}, 0.4);
  double ab = joint_weighted_similarity(ra_.joint, rb_.joint, &w, {0.5}, {60.0, 1.0}, g_, t_);
  double ba = joint_weighted_similarity(rb_.joint, ra_.joint, &w, {0.5}, {60.0, 1.0}, g_, t_);
  EXPECT_NEAR(ab, ba, 1e-14 * ab);
  EXPECT_GE(ab, 0.0);
}

TEST(Joint, OneCellOnePeriodClosedForm) {
  GridSpec g = unit_degree_grid(3);
  auto rep = build_representation(account_in_cells("u", {4}, g), g, testing::single_period());
  double s = joint_weighted_similarity(rep.joint, rep.joint, nullptr, {0.5}, {60.0, 2.0}, g, testing::single_period());
  EXPECT_NEAR(s, std::sqrt(1.0 / (2 * std::numbers::pi * 60.0)) * std::sqrt(1.0 / (4 * std::numbers::pi)), 1e-15);
}

TEST(Joint, TemporalOnlyIgnoresDistance) {
  GridSpec g = testing::metric_grid(10, 1000.0);
  auto a = build_representation(account_in_cells("a", {0}, g), g, testing::single_period());
  auto b = build_representation(account_in_cells("b", {99}, g), g, testing::single_period());
  double s = joint_weighted_similarity(a.joint, b.joint, nullptr, {0.0}, {60.0, 1.0}, g, testing::single_period());
  EXPECT_NEAR(s, 1.0 / (2 * std::numbers::pi), 1e-15);
  EXPECT_EQ(joint_weighted_similarity(a.joint, b.joint, nullptr, {1.0}, {60.0, 1.0}, g, testing::single_period()), 0.0);
}

TEST(Joint, MissingWeightThrows) {
  GridSpec g = unit_degree_grid(3);
  auto rep = build_representation(account_in_cells("u", {4}, g), g, testing::single_period());
  WeightTable empty;
  EXPECT_THROW(joint_weighted_similarity(rep.joint, rep.joint, &empty, {0.5}, {}, g, testing::single_period()), Error);
}

TEST(Params, Validation) {
  EXPECT_THROW((MixParam{1.5}.validate()), Error);
  EXPECT_THROW((MixParam{-0.1}.validate()), Error);
  EXPECT_THROW((Bandwidths{0.0, 1.0}.validate()), Error);
  EXPECT_THROW((Bandwidths{1.0, -1.0}.validate()), Error);
}

}  // namespace
}  // namespace geolink
