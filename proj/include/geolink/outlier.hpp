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

// Density-peaks clustering over the occupied cells of one account, and the
// outlier filter built on it.
//
// For each cell: rho = number of other cells closer than d_c, delta = distance
// to the nearest cell ranked denser, xi = rho * delta. Cells with xi at or
// above the threshold seed clusters; the rest follow their nearest denser
// cell when it lies within d_c. Whatever stays unlabelled is an outlier
// unless its probability reaches the floor.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "geolink/error.hpp"
#include "geolink/index.hpp"

namespace geolink {

struct DpParams {
  double cutoff_m = 1.0;            // d_c, meters
  double xi_threshold = 30.0;       // count * meters
  double varpi_threshold = 0.00005; // cells with at least this probability are always kept

  void validate() const {
    if (!(cutoff_m > 0.0)) throw Error("cutoff distance d_c must be > 0");
    if (!(xi_threshold >= 0.0)) throw Error("xi threshold must be >= 0");
    if (!(varpi_threshold >= 0.0 && varpi_threshold <= 1.0)) throw Error("probability floor must lie in [0, 1]");
  }

  // 1.5 cell diagonals, so the 8-neighbourhood counts.
  static double default_cutoff(const GridSpec& grid) { return 1.5 * grid.cell_diagonal_meters(); }
};

struct CellScore {
  CellId cell = 0;
  std::int64_t rho = 0;
  double delta = 0.0;
  double xi = 0.0;
};

inline constexpr std::int64_t kNoCluster = -1;

struct ClusterAssignment {
  std::vector<CellScore> scores;      // same order as the input cells
  std::vector<std::int64_t> labels;   // cluster label per cell, kNoCluster if none
  std::vector<std::size_t> centers;   // indices of center cells, densest first
};

namespace detail {

inline std::vector<double> pairwise_distances(std::span<const CellId> cells, const GridSpec& grid) {
  const std::size_t n = cells.size();
  std::vector<PointMeters> centers;
  centers.reserve(n);
  for (CellId c : cells) centers.push_back(cell_center_meters(c, grid));
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = distance_meters(centers[i], centers[j]);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

}  // namespace detail

// Order of "denser": higher rho first, ties by ascending cell id.
inline ClusterAssignment cluster_cells(std::span<const CellId> cells, const GridSpec& grid, const DpParams& params) {
  params.validate();
  const std::size_t n = cells.size();
  ClusterAssignment out;
  out.scores.resize(n);
  out.labels.assign(n, kNoCluster);
  if (n == 0) return out;

  const auto dist = detail::pairwise_distances(cells, grid);
  for (std::size_t i = 0; i < n; ++i) {
    out.scores[i].cell = cells[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && dist[i * n + j] < params.cutoff_m) ++out.scores[i].rho;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out.scores[a].rho != out.scores[b].rho) return out.scores[a].rho > out.scores[b].rho;
    return cells[a] < cells[b];
  });

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> nearest_denser(n, kNone);
  for (std::size_t rank = 0; rank < n; ++rank) {
    const std::size_t i = order[rank];
    auto& s = out.scores[i];
    if (rank == 0) {
      for (std::size_t j = 0; j < n; ++j) s.delta = std::max(s.delta, dist[i * n + j]);
    } else {
      double best = 0.0;
      for (std::size_t r = 0; r < rank; ++r) {
        const std::size_t j = order[r];
        const double d = dist[i * n + j];
        if (nearest_denser[i] == kNone || d < best || (d == best && cells[j] < cells[nearest_denser[i]])) {
          best = d;
          nearest_denser[i] = j;
        }
      }
      s.delta = best;
    }
    s.xi = static_cast<double>(s.rho) * s.delta;
  }

  std::int64_t next_label = 0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    const std::size_t i = order[rank];
    if (out.scores[i].xi >= params.xi_threshold) {
      out.labels[i] = next_label++;
      out.centers.push_back(i);
      continue;
    }
    const std::size_t up = nearest_denser[i];
    if (up != kNone && out.scores[i].delta < params.cutoff_m) out.labels[i] = out.labels[up];
  }
  return out;
}

// Cells in the given order with their scores; see cluster_cells.
inline std::vector<CellScore> density_peaks(std::span<const CellId> cells, const GridSpec& grid,
                                            const DpParams& params) {
  return cluster_cells(cells, grid, params).scores;
}

struct OutlierResult {
  SpatioTemporalRepresentation pruned;
  std::vector<CellId> removed;  // ascending
};

// Survivor probabilities are left as they were. If every cell would go,
// the representation comes back unchanged.
inline OutlierResult detect_outliers(const SpatioTemporalRepresentation& gt, const GridSpec& grid,
                                     const DpParams& params) {
  if (gt.empty()) throw Error("outlier detection needs a non-empty representation");
  std::vector<CellId> cells;
  cells.reserve(gt.size());
  for (const auto& e : gt.entries) cells.push_back(e.cell);
  const auto assignment = cluster_cells(cells, grid, params);

  OutlierResult out;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto& e = gt.entries[i];
    if (assignment.labels[i] != kNoCluster || e.probability >= params.varpi_threshold)
      out.pruned.entries.push_back(e);
    else
      out.removed.push_back(e.cell);
  }
  if (out.pruned.empty()) {
    out.pruned = gt;
    out.removed.clear();
  }
  return out;
}

}  // namespace geolink
