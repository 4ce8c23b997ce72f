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

// Kernel-density similarity between two accounts: record-level (naive),
// grid/period-level (indexed) and the joint weighted spatio-temporal score.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/index.hpp"
#include "geolink/model.hpp"
#include "geolink/weights.hpp"

namespace geolink {

struct Bandwidths {
  double spatial_m = 60.0;  // meters
  double temporal = 1.0;    // period widths

  void validate() const {
    if (!(spatial_m > 0.0)) throw Error("spatial bandwidth must be > 0");
    if (!(temporal > 0.0)) throw Error("temporal bandwidth must be > 0");
  }
};

// Trade-off between the spatial (alpha) and temporal (1 - alpha) factors.
struct MixParam {
  double alpha = 0.5;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  }
};

struct SimilarityParts {
  double spatial = 0.0;
  double temporal = 0.0;
  double total = 0.0;
};

// Optional instrumentation: number of Gaussian kernel evaluations performed.
struct KernelTally {
  std::uint64_t spatial = 0;
  std::uint64_t temporal = 0;

  std::uint64_t total() const { return spatial + temporal; }
  KernelTally& operator+=(const KernelTally& o) {
    spatial += o.spatial;
    temporal += o.temporal;
    return *this;
  }
};

// (1 / (2 pi h)) exp(-distance^2 / (2 h^2))
inline double gaussian_kernel(double distance, double h) {
  if (!(h > 0.0)) throw Error("kernel bandwidth must be > 0");
  if (distance < 0.0) distance = -distance;
  return std::exp(-(distance * distance) / (2.0 * h * h)) / (2.0 * std::numbers::pi * h);
}

// Units for record-level distances: meters via the grid's projection latitude,
// and time in period widths.
struct RecordMetric {
  double ref_lat = 0.0;
  double seconds_per_unit = 1.0;

  static RecordMetric from_specs(const GridSpec& grid, const TimeSpec& time) {
    return {grid.ref_lat, time.period_width()};
  }
};

inline SimilarityParts naive_similarity(const AccountRecordSet& a, const AccountRecordSet& b, const Bandwidths& bw,
                                        const RecordMetric& metric, KernelTally* tally = nullptr) {
  if (a.records.empty() || b.records.empty()) throw Error("naive similarity needs non-empty record sets");
  bw.validate();
  double s_sum = 0.0, t_sum = 0.0;
  for (const auto& ra : a.records) {
    for (const auto& rb : b.records) {
      s_sum += gaussian_kernel(distance_meters(ra.lat, ra.lng, rb.lat, rb.lng, metric.ref_lat), bw.spatial_m);
      double dt = static_cast<double>(ra.timestamp - rb.timestamp) / metric.seconds_per_unit;
      t_sum += gaussian_kernel(dt, bw.temporal);
    }
  }
  const double pairs = static_cast<double>(a.size()) * static_cast<double>(b.size());
  if (tally) {
    tally->spatial += static_cast<std::uint64_t>(pairs);
    tally->temporal += static_cast<std::uint64_t>(pairs);
  }
  SimilarityParts out;
  out.spatial = s_sum / pairs;
  out.temporal = t_sum / pairs;
  out.total = out.spatial + out.temporal;
  return out;
}

// How the indexed double sum is scaled.
enum class CellNormalization {
  kPerCellPair,  // divide by N1 * N2: the grid-index similarity as published
  kMassOnly,     // plain sum of K * p1 * p2: the grid estimate of the naive score
};

inline void check_same_specs(const GridSpec& grid, const TimeSpec& time) {
  grid.validate();
  time.validate();
}

// Representations must come from `grid` and `time`; cell or period ids
// outside them raise.
inline SimilarityParts indexed_similarity(const AccountRepresentation& a, const AccountRepresentation& b,
                                          const GridSpec& grid, const TimeSpec& time, const Bandwidths& bw,
                                          CellNormalization norm = CellNormalization::kPerCellPair,
                                          KernelTally* tally = nullptr) {
  check_same_specs(grid, time);
  bw.validate();
  for (const auto* rep : {&a, &b}) {
    for (const auto& e : rep->time.entries)
      if (e.period < 0 || e.period >= time.periods) throw Error("period id outside the time spec");
  }

  std::vector<PointMeters> cb;
  cb.reserve(b.grid.entries.size());
  for (const auto& e : b.grid.entries) cb.push_back(cell_center_meters(e.cell, grid));

  double s_sum = 0.0;
  for (const auto& ea : a.grid.entries) {
    const auto ca = cell_center_meters(ea.cell, grid);
    for (std::size_t j = 0; j < cb.size(); ++j)
      s_sum += gaussian_kernel(distance_meters(ca, cb[j]), bw.spatial_m) * ea.probability * b.grid.entries[j].probability;
  }
  double t_sum = 0.0;
  for (const auto& ea : a.time.entries) {
    for (const auto& eb : b.time.entries)
      t_sum += gaussian_kernel(static_cast<double>(ea.period - eb.period), bw.temporal) * ea.probability *
               eb.probability;
  }
  const auto n_cells = a.grid.entries.size() * b.grid.entries.size();
  const auto n_periods = a.time.entries.size() * b.time.entries.size();
  if (tally) {
    tally->spatial += n_cells;
    tally->temporal += n_periods;
  }
  SimilarityParts out;
  if (norm == CellNormalization::kPerCellPair) {
    out.spatial = s_sum / static_cast<double>(n_cells);
    out.temporal = t_sum / static_cast<double>(n_periods);
  } else {
    out.spatial = s_sum;
    out.temporal = t_sum;
  }
  out.total = out.spatial + out.temporal;
  return out;
}

namespace detail {

// One side of a joint comparison with cell centers and weights resolved.
struct ResolvedCells {
  std::vector<PointMeters> centers;
  std::vector<double> cell_mass;                 // p(g) * w(g)
  std::vector<std::vector<PeriodMass>> periods;  // probability already times w(T)
};

inline ResolvedCells resolve(const SpatioTemporalRepresentation& gt, const WeightTable* weights,
                             const GridSpec& grid, const TimeSpec& time) {
  ResolvedCells out;
  out.centers.reserve(gt.size());
  out.cell_mass.reserve(gt.size());
  out.periods.reserve(gt.size());
  for (const auto& e : gt.entries) {
    out.centers.push_back(cell_center_meters(e.cell, grid));
    out.cell_mass.push_back(e.probability * (weights ? weights->cell(e.cell) : 1.0));
    std::vector<PeriodMass> ps;
    ps.reserve(e.periods.size());
    for (const auto& p : e.periods) {
      if (p.period < 0 || p.period >= time.periods) throw Error("period id outside the time spec");
      ps.push_back({p.period, p.probability * (weights ? weights->period(p.period) : 1.0)});
    }
    out.periods.push_back(std::move(ps));
  }
  return out;
}

// x^e with 0^0 == 1.
inline double mixed_power(double x, double e) { return e == 0.0 ? 1.0 : std::pow(x, e); }

}  // namespace detail

// S = 1/(X Y) sum_x sum_y [Ks * p1 p2 w1 w2]^alpha * [sum_i sum_j Kt * p1(T) p2(T) w(T_i) w(T_j)]^(1 - alpha)
//
// A null weight table means unit weights. Accumulation runs in ascending
// cell id, then period id, so the value is bit-reproducible.
inline double joint_weighted_similarity(const SpatioTemporalRepresentation& a, const SpatioTemporalRepresentation& b,
                                        const WeightTable* weights, const MixParam& mix, const Bandwidths& bw,
                                        const GridSpec& grid, const TimeSpec& time, KernelTally* tally = nullptr) {
  mix.validate();
  bw.validate();
  if (a.empty() || b.empty()) return 0.0;
  const auto ra = detail::resolve(a, weights, grid, time);
  const auto rb = detail::resolve(b, weights, grid, time);
  const double alpha = mix.alpha;
  const double beta = 1.0 - alpha;
  std::uint64_t n_spatial = 0, n_temporal = 0;

  double total = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      double spatial_factor = 1.0;
      if (alpha > 0.0) {
        spatial_factor = gaussian_kernel(distance_meters(ra.centers[x], rb.centers[y]), bw.spatial_m) *
                         ra.cell_mass[x] * rb.cell_mass[y];
        ++n_spatial;
        // Exact: 0^alpha == 0 for alpha > 0, temporal factor is irrelevant.
        if (spatial_factor == 0.0) continue;
      }
      double temporal_factor = 1.0;
      if (beta > 0.0) {
        double t_sum = 0.0;
        for (const auto& pa : ra.periods[x]) {
          for (const auto& pb : rb.periods[y])
            t_sum += gaussian_kernel(static_cast<double>(pa.period - pb.period), bw.temporal) * pa.probability *
                     pb.probability;
        }
        n_temporal += ra.periods[x].size() * rb.periods[y].size();
        temporal_factor = t_sum;
      }
      total += detail::mixed_power(spatial_factor, alpha) * detail::mixed_power(temporal_factor, beta);
    }
  }
  if (tally) {
    tally->spatial += n_spatial;
    tally->temporal += n_temporal;
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace geolink
