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

// End-to-end account linkage:
//   specs -> representations -> weights -> outlier pruning -> candidates -> scoring
// and precision / recall / F1 against ground truth.

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geolink/candidates.hpp"
#include "geolink/error.hpp"
#include "geolink/index.hpp"
#include "geolink/kde.hpp"
#include "geolink/model.hpp"
#include "geolink/outlier.hpp"
#include "geolink/parallel.hpp"
#include "geolink/weights.hpp"

namespace geolink {

// Which optional stages run. The four named variants match the ablation study.
struct Stages {
  bool outliers = true;
  bool weights = true;
  bool pruning = true;

  friend bool operator==(const Stages&, const Stages&) = default;
};

enum class Variant { kS1, kS2, kS3, kFull };

inline Stages stages_for(Variant v) {
  switch (v) {
    case Variant::kS1: return {false, false, false};
    case Variant::kS2: return {true, false, false};
    case Variant::kS3: return {true, true, false};
    case Variant::kFull: return {true, true, true};
  }
  return {};
}

inline std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kS1: return "S1";
    case Variant::kS2: return "S2";
    case Variant::kS3: return "S3";
    case Variant::kFull: return "full";
  }
  return "?";
}

inline Variant parse_variant(std::string_view name) {
  if (name == "S1" || name == "s1") return Variant::kS1;
  if (name == "S2" || name == "s2") return Variant::kS2;
  if (name == "S3" || name == "s3") return Variant::kS3;
  if (name == "full") return Variant::kFull;
  throw Error("unknown variant '" + std::string(name) + "' (expected S1, S2, S3 or full)");
}

// Defaults follow the settings reported for the Gowalla split experiment.
struct LinkConfig {
  std::int64_t d = 15000;
  std::int32_t periods = 2880;
  Bandwidths bandwidths{60.0, 1.0};
  MixParam mix{0.5};
  double q = 0.4;
  std::size_t k = 1;
  std::optional<double> cutoff_m;  // d_c; unset means DpParams::default_cutoff(grid)
  double xi_threshold = 30.0;
  double varpi_threshold = 0.00005;
  double s_delta = 0.00002;
  Stages stages;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (d < 1) throw Error("grid size d must be >= 1");
    if (periods < 1) throw Error("period count M must be >= 1");
    bandwidths.validate();
    mix.validate();
    if (!(q > 0.0)) throw Error("Renyi order q must be > 0");
    if (k < 1) throw Error("candidate count k must be >= 1");
    if (cutoff_m && !(*cutoff_m > 0.0)) throw Error("cutoff distance d_c must be > 0");
    if (!(s_delta >= 0.0)) throw Error("similarity threshold must be >= 0");
  }

  DpParams dp_params(const GridSpec& grid) const {
    return {cutoff_m ? *cutoff_m : DpParams::default_cutoff(grid), xi_threshold, varpi_threshold};
  }
};

struct ScoredPair {
  AccountId left;
  AccountId right;
  double score = 0.0;
};

struct RemovedCells {
  AccountId account;
  std::vector<CellId> cells;
};

struct LinkTimings {
  double preprocessing_s = 0.0;  // index + weights + outliers + candidate retrieval
  double calculation_s = 0.0;    // pair scoring
};

struct LinkOutput {
  GridSpec grid;
  TimeSpec time;
  DpParams dp;
  std::vector<ScoredPair> pairs;  // S >= s_delta, candidate order
  std::size_t candidates_scored = 0;
  KernelTally kernel_evaluations;
  std::vector<RemovedCells> removed_left;
  std::vector<RemovedCells> removed_right;
  LinkTimings timings;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<SpatioTemporalRepresentation> prune_all(const std::vector<AccountRepresentation>& reps,
                                                           const GridSpec& grid, const DpParams& dp, bool enabled,
                                                           std::vector<RemovedCells>& removed, unsigned threads) {
  std::vector<SpatioTemporalRepresentation> out(reps.size());
  std::vector<std::vector<CellId>> dropped(reps.size());
  parallel_for(reps.size(), threads, [&](std::size_t i) {
    if (!enabled) {
      out[i] = reps[i].joint;
      return;
    }
    auto r = detect_outliers(reps[i].joint, grid, dp);
    out[i] = std::move(r.pruned);
    dropped[i] = std::move(r.removed);
  });
  for (std::size_t i = 0; i < reps.size(); ++i)
    if (!dropped[i].empty()) removed.push_back({reps[i].account_id, std::move(dropped[i])});
  return out;
}

}  // namespace detail

inline LinkOutput link_accounts(const Dataset& left, const Dataset& right, const LinkConfig& cfg) {
  cfg.validate();
  if (left.empty() || right.empty()) throw Error("both datasets must be non-empty");
  LinkOutput out;
  const auto t0 = std::chrono::steady_clock::now();

  std::tie(out.grid, out.time) = build_specs(left, right, cfg.d, cfg.periods);
  out.dp = cfg.dp_params(out.grid);
  const auto reps_left = build_representations(left, out.grid, out.time, cfg.threads);
  const auto reps_right = build_representations(right, out.grid, out.time, cfg.threads);

  std::optional<WeightTable> weights;
  if (cfg.stages.weights) weights = build_weight_table(reps_left, reps_right, cfg.q);

  const auto gt_left = detail::prune_all(reps_left, out.grid, out.dp, cfg.stages.outliers, out.removed_left, cfg.threads);
  const auto gt_right =
      detail::prune_all(reps_right, out.grid, out.dp, cfg.stages.outliers, out.removed_right, cfg.threads);

  std::vector<AccountId> right_ids;
  right_ids.reserve(reps_right.size());
  for (const auto& r : reps_right) right_ids.push_back(r.account_id);
  const CandidateSet candidates = cfg.stages.pruning
                                      ? retrieve_candidates(gt_left, gt_right, right_ids, cfg.k, cfg.threads)
                                      : all_pairs(gt_left.size(), gt_right.size());
  out.timings.preprocessing_s = detail::seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  const WeightTable* table = weights ? &*weights : nullptr;
  std::vector<double> scores(candidates.size());
  std::vector<KernelTally> tallies(candidates.size());
  parallel_for(candidates.size(), cfg.threads, [&](std::size_t c) {
    const auto& cand = candidates.pairs[c];
    scores[c] = joint_weighted_similarity(gt_left[cand.left], gt_right[cand.right], table, cfg.mix, cfg.bandwidths,
                                          out.grid, out.time, &tallies[c]);
  });
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    out.kernel_evaluations += tallies[c];
    if (scores[c] >= cfg.s_delta) {
      const auto& cand = candidates.pairs[c];
      out.pairs.push_back({reps_left[cand.left].account_id, reps_right[cand.right].account_id, scores[c]});
    }
  }
  out.candidates_scored = candidates.size();
  out.timings.calculation_s = detail::seconds_since(t1);
  return out;
}

// --- Evaluation ----------------------------------------------------------------

struct LinkageResult {
  std::size_t correct = 0;   // M: returned pairs present in the ground truth
  std::size_t truth = 0;     // N: ground-truth pairs
  std::size_t returned = 0;  // K: distinct returned pairs
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision is 0 when nothing is returned; F1 is 0 when both P and R are.
inline LinkageResult metrics_from_counts(std::size_t correct, std::size_t truth, std::size_t returned) {
  if (truth == 0) throw Error("evaluation needs a non-empty ground truth");
  if (correct > truth || correct > returned) throw Error("correct count exceeds truth or returned count");
  LinkageResult r;
  r.correct = correct;
  r.truth = truth;
  r.returned = returned;
  r.recall = static_cast<double>(correct) / static_cast<double>(truth);
  r.precision = returned == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(returned);
  // 2PR / (P + R) rewritten as 2M / (N + K): one rounding step.
  r.f1 = correct == 0 ? 0.0 : 2.0 * static_cast<double>(correct) / static_cast<double>(truth + returned);
  return r;
}

inline LinkageResult evaluate(std::span<const ScoredPair> pairs, const GroundTruth& truth) {
  if (truth.empty()) throw Error("evaluation needs a non-empty ground truth");
  std::set<GroundTruth::Pair> returned;
  for (const auto& p : pairs) returned.emplace(p.left, p.right);
  std::size_t correct = 0;
  for (const auto& p : returned)
    if (truth.contains(p.first, p.second)) ++correct;
  return metrics_from_counts(correct, truth.size(), returned.size());
}

}  // namespace geolink
