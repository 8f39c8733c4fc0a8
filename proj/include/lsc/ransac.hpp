#pragma once

/// Seeded RANSAC baseline for benchmarks: sequential fit-and-remove over k
/// rounds, uniform minimal subsets, consensus by inlier count at a fixed
/// residual threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lsc/dataset.hpp"
#include "lsc/geometry.hpp"
#include "lsc/selector.hpp"

namespace lsc {

/// Subset count needed to hit one structure with probability beta at outlier
/// ratio alpha (rho points per subset), rounded to the nearest integer.
inline int ransac_iteration_count(double beta, double alpha, int rho) {
  const double good = std::pow(1.0 - alpha, rho);
  if (good >= 1.0) return 1;
  const double m = std::log1p(-beta) / std::log1p(-good);
  return std::max(1, static_cast<int>(std::lround(m)));
}

/// Draw rho distinct indices from [0, n) in draw order.
inline std::vector<int> draw_minimal_subset(Rng& rng, int n, int rho) {
  std::vector<int> picked;
  picked.reserve(static_cast<size_t>(rho));
  while (static_cast<int>(picked.size()) < rho) {
    const int c = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    if (std::find(picked.begin(), picked.end(), c) == picked.end())
      picked.push_back(c);
  }
  return picked;
}

/// k rounds of classic RANSAC with inlier removal between rounds. Labels are
/// assigned in round order; points never claimed stay 0.
inline FitResult ransac_baseline(const std::vector<DataPoint>& points,
                                 ModelType kind, int iterations,
                                 double threshold, uint64_t seed, int k = 1) {
  const int n = static_cast<int>(points.size());
  const int rho = minimal_subset_size(kind);
  FitResult result;
  result.labels.assign(static_cast<size_t>(n), 0);
  Rng rng(seed);

  std::vector<int> active(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) active[static_cast<size_t>(i)] = i;

  for (int round = 0; round < k; ++round) {
    if (static_cast<int>(active.size()) <= rho) break;
    int best_count = -1;
    Hypothesis best;
    for (int it = 0; it < iterations; ++it) {
      const std::vector<int> pick =
          draw_minimal_subset(rng, static_cast<int>(active.size()), rho);
      std::vector<DataPoint> subset;
      subset.reserve(static_cast<size_t>(rho));
      for (int idx : pick) subset.push_back(points[static_cast<size_t>(active[static_cast<size_t>(idx)])]);
      Hypothesis h;
      try {
        h = minimal_fit(kind, subset);
      } catch (const DegenerateSubset&) {
        continue;
      }
      int count = 0;
      for (int idx : active)
        if (residual(h, points[static_cast<size_t>(idx)]) <= threshold) ++count;
      if (count > best_count) {
        best_count = count;
        best = h;
      }
    }
    if (best_count < rho) break;
    std::vector<int> next_active;
    next_active.reserve(active.size());
    for (int idx : active) {
      if (residual(best, points[static_cast<size_t>(idx)]) <= threshold)
        result.labels[static_cast<size_t>(idx)] = round + 1;
      else
        next_active.push_back(idx);
    }
    best.id = round;
    result.instances.push_back(std::move(best));
    active = std::move(next_active);
  }
  result.diagnostics["instances"] = static_cast<double>(result.instances.size());
  return result;
}

}  // namespace lsc
