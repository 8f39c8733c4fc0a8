#pragma once

/// Deterministic minimal-subset sampling (LSC-SA): neighborhood-seeded
/// hypotheses, latent-space outlier pruning, latent-neighbor resampling and
/// a weighted hypothesis-updating loop. The whole path is a pure function of
/// its inputs; repeated calls produce bitwise-identical output.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "lsc/errors.hpp"
#include "lsc/geometry.hpp"
#include "lsc/latent.hpp"
#include "lsc/parallel.hpp"
#include "lsc/preference.hpp"

namespace lsc {

enum class NeighborMetric { InputSpace, LatentSpace };

struct SamplerConfig {
  double psi = 0.01;         // preference threshold
  int k = 1;                 // latent rank = expected structure count
  int update_iterations = 10;
  int rank_window = 10;      // refit uses sorted-residual ranks window-rho+1..window
  double scale_quantile = 0.1;
  NeighborMetric neighbor_metric = NeighborMetric::LatentSpace;
  double density_fraction = 1.0;  // ablation knob: fraction of seed points used
};

/// Diagnostics filled by lsc_sa as a side channel.
struct SamplerStats {
  int initial_hypotheses = 0;
  int retained_points = 0;
  int degenerate_seeds = 0;
};

/// Standard normal quantile.
inline double normal_quantile(double p) {
  return boost::math::erf_inv(2.0 * p - 1.0) * std::sqrt(2.0);
}

/// For each row of coords, the rho nearest other rows by Euclidean distance.
/// Exact ties resolve to the lower row index; output follows query order.
inline std::vector<std::vector<int>> knn_indices(const Eigen::MatrixXd& coords,
                                                 int rho) {
  const int n = static_cast<int>(coords.rows());
  if (n < rho + 1) throw TooFewPoints("need at least rho+1 rows for knn");
  std::vector<std::vector<int>> out(static_cast<size_t>(n));
  parallel_for(static_cast<size_t>(n), [&](size_t qi) {
    const int i = static_cast<int>(qi);
    std::vector<std::pair<double, int>> dist;
    dist.reserve(static_cast<size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back((coords.row(i) - coords.row(j)).norm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + rho, dist.end());
    std::vector<int> nb(static_cast<size_t>(rho));
    for (int r = 0; r < rho; ++r) nb[static_cast<size_t>(r)] = dist[r].second;
    out[qi] = std::move(nb);
  });
  return out;
}

/// K-th ordered scale estimate: the q-th smallest absolute residual over the
/// given points divided by the matching normal quantile, q = ceil(quantile*n).
/// Floors at 1e-9 when the q smallest residuals are all zero.
inline double estimate_scale(const Hypothesis& h,
                             const std::vector<DataPoint>& points,
                             double scale_quantile) {
  const size_t n = points.size();
  if (n == 0) throw TooFewPoints("estimate_scale on empty point list");
  std::vector<double> r = residuals(h, points);
  size_t q = static_cast<size_t>(
      std::ceil(scale_quantile * static_cast<double>(n)));
  q = std::min(std::max<size_t>(q, 1), n);
  std::nth_element(r.begin(), r.begin() + static_cast<long>(q - 1), r.end());
  const double rq = r[q - 1];
  if (rq <= 0.0) return 1e-9;
  const double z =
      normal_quantile(0.5 * (1.0 + static_cast<double>(q) / static_cast<double>(n)));
  return std::max(rq / z, 1e-9);
}

/// Kernel bandwidth for the weighting function. The two Epanechnikov moment
/// integrals evaluate in closed form to 0.6 and 0.2, which folds the bracket
/// into (145.8 / (7 n))^(1/5).
inline double bandwidth(double delta, int n) {
  return std::pow(145.8 / (7.0 * static_cast<double>(n)), 0.2) * delta;
}

/// Epanechnikov kernel: 0.75 (1 - t^2) on |t| <= 1, else 0.
inline double epanechnikov(double t) {
  const double a = std::abs(t);
  return a <= 1.0 ? 0.75 * (1.0 - a * a) : 0.0;
}

/// Kernel-density weighting of a hypothesis over all points; h.scale must be
/// set. Larger weights mean more points with small residuals.
inline double hypothesis_weight(const Hypothesis& h,
                                const std::vector<DataPoint>& points) {
  const int n = static_cast<int>(points.size());
  const double delta = h.scale;
  const double b = bandwidth(delta, n);
  double sum = 0.0;
  for (const auto& s : points) sum += epanechnikov(residual(h, s) / b);
  return sum / (static_cast<double>(n) * delta * b);
}

namespace detail {

/// The first `count` indices of 0..n-1 ordered by ascending value, exact
/// ties by lower index.
inline std::vector<int> lowest_ranked_indices(const std::vector<double>& values,
                                              int count) {
  std::vector<std::pair<double, int>> pairs(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    pairs[i] = {values[i], static_cast<int>(i)};
  std::partial_sort(pairs.begin(), pairs.begin() + count, pairs.end());
  std::vector<int> idx(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) idx[static_cast<size_t>(i)] = pairs[static_cast<size_t>(i)].second;
  return idx;
}

inline Hypothesis weighted(Hypothesis h, const std::vector<DataPoint>& points,
                           double scale_quantile) {
  h.scale = estimate_scale(h, points, scale_quantile);
  h.weight = hypothesis_weight(h, points);
  return h;
}

}  // namespace detail

/// Hypothesis updating: repeatedly refit on the points at sorted-residual
/// ranks (rank_window - rho + 1) .. rank_window and keep the iterate of
/// maximum weight (ties go to the earliest iterate, with the seed hypothesis
/// as iterate zero). A degenerate refit ends the loop; if nothing ever
/// refits, the weighted seed is returned.
inline Hypothesis update_hypothesis(const Hypothesis& h0,
                                    const std::vector<DataPoint>& points,
                                    const SamplerConfig& cfg) {
  const int rho = minimal_subset_size(h0.kind);
  const int n = static_cast<int>(points.size());
  if (n == 0) throw TooFewPoints("update_hypothesis on empty point list");
  const int window = std::min(cfg.rank_window, n);

  Hypothesis best = detail::weighted(h0, points, cfg.scale_quantile);
  if (window < rho) return best;

  Hypothesis current = best;
  for (int iter = 0; iter < cfg.update_iterations; ++iter) {
    const std::vector<double> r = residuals(current, points);
    const std::vector<int> ranked = detail::lowest_ranked_indices(r, window);
    std::vector<DataPoint> refit_set;
    refit_set.reserve(static_cast<size_t>(rho));
    for (int j = window - rho; j < window; ++j)
      refit_set.push_back(points[static_cast<size_t>(ranked[j])]);
    Hypothesis next;
    try {
      next = least_squares_fit(h0.kind, refit_set);
    } catch (const DegenerateSubset&) {
      break;  // same ranks would fail again on the next pass
    }
    current = detail::weighted(next, points, cfg.scale_quantile);
    if (current.weight > best.weight) best = current;
  }
  return best;
}

/// LSC-SA. Seeds one hypothesis from the input-space rho-neighborhood of
/// every point, prunes latent-space outliers by entropy, re-samples subsets
/// from rho-neighborhoods of the retained points in the latent space, and
/// refines each regenerated hypothesis with the updating loop. Returns the
/// refined hypotheses with scale and weight set; hypothesis ids index the
/// retained points whose neighborhoods generated them.
inline std::vector<Hypothesis> lsc_sa(const std::vector<DataPoint>& points,
                                      ModelType kind, const SamplerConfig& cfg,
                                      SamplerStats* stats = nullptr,
                                      std::vector<std::vector<int>>* subsets_out = nullptr) {
  const int n = static_cast<int>(points.size());
  const int rho = minimal_subset_size(kind);
  if (n <= rho) throw TooFewPoints("lsc_sa needs more points than rho");

  // Step 1: initial hypotheses from input-space neighborhoods.
  Eigen::MatrixXd input_coords(n, points[0].coords.size());
  for (int i = 0; i < n; ++i) input_coords.row(i) = points[i].coords;
  const auto input_nn = knn_indices(input_coords, rho);

  std::vector<int> seed_ids;
  if (cfg.density_fraction >= 1.0) {
    seed_ids.resize(static_cast<size_t>(n));
    std::iota(seed_ids.begin(), seed_ids.end(), 0);
  } else {
    // Uniform stride subsample for the density ablation.
    const int count =
        std::max(rho + 1, static_cast<int>(std::ceil(cfg.density_fraction * n)));
    const double stride = static_cast<double>(n) / count;
    for (int j = 0; j < count; ++j)
      seed_ids.push_back(std::min(n - 1, static_cast<int>(j * stride)));
  }

  std::vector<std::optional<Hypothesis>> initial(seed_ids.size());
  int degenerate = 0;
  for (size_t si = 0; si < seed_ids.size(); ++si) {
    std::vector<DataPoint> subset;
    subset.reserve(static_cast<size_t>(rho));
    for (int j : input_nn[static_cast<size_t>(seed_ids[si])])
      subset.push_back(points[static_cast<size_t>(j)]);
    try {
      initial[si] = minimal_fit(kind, subset);
    } catch (const DegenerateSubset&) {
      ++degenerate;
    }
  }
  std::vector<Hypothesis> initial_hyps;
  initial_hyps.reserve(seed_ids.size());
  for (auto& h : initial)
    if (h.has_value()) initial_hyps.push_back(std::move(*h));
  if (initial_hyps.empty()) throw TooFewPoints("no valid initial hypotheses");

  // Steps 2-3: data-point latent space, entropy pruning of outliers.
  const PreferenceMatrix pref =
      build_preference_matrix(points, initial_hyps, cfg.psi);
  const int rank = std::min<int>(cfg.k, static_cast<int>(std::min(pref.rows(), pref.cols())));
  const TruncatedSvd svd = truncated_svd(pref, rank);
  const LatentCoords dp = lss_coords(svd, LatentSide::DataPoints);
  std::vector<int> retained = entropy_prune_or_all(dp.origin_distances);
  if (static_cast<int>(retained.size()) < rho + 1) {
    retained.resize(static_cast<size_t>(n));
    std::iota(retained.begin(), retained.end(), 0);
  }

  // Step 4: rho-neighborhoods among retained points.
  const Eigen::Index dim = cfg.neighbor_metric == NeighborMetric::LatentSpace
                               ? dp.coords.cols()
                               : input_coords.cols();
  Eigen::MatrixXd retained_coords(static_cast<Eigen::Index>(retained.size()), dim);
  for (size_t i = 0; i < retained.size(); ++i) {
    if (cfg.neighbor_metric == NeighborMetric::LatentSpace)
      retained_coords.row(static_cast<Eigen::Index>(i)) = dp.coords.row(retained[i]);
    else
      retained_coords.row(static_cast<Eigen::Index>(i)) = input_coords.row(retained[i]);
  }
  const auto latent_nn = knn_indices(retained_coords, rho);

  // Steps 5-15: regenerate one subset per retained point and refine it.
  std::vector<std::optional<Hypothesis>> refined(retained.size());
  std::vector<std::vector<int>> subsets(retained.size());
  parallel_for(retained.size(), [&](size_t qi) {
    std::vector<int> subset_ids;
    subset_ids.reserve(static_cast<size_t>(rho));
    for (int j : latent_nn[qi]) subset_ids.push_back(retained[static_cast<size_t>(j)]);
    subsets[qi] = subset_ids;
    std::vector<DataPoint> subset;
    subset.reserve(subset_ids.size());
    for (int id : subset_ids) subset.push_back(points[static_cast<size_t>(id)]);
    Hypothesis h0;
    try {
      h0 = minimal_fit(kind, subset);
    } catch (const DegenerateSubset&) {
      return;
    }
    Hypothesis h = update_hypothesis(h0, points, cfg);
    h.id = retained[qi];
    refined[qi] = std::move(h);
  });

  std::vector<Hypothesis> out;
  out.reserve(retained.size());
  if (subsets_out != nullptr) subsets_out->clear();
  for (size_t qi = 0; qi < retained.size(); ++qi) {
    if (!refined[qi].has_value()) continue;
    out.push_back(std::move(*refined[qi]));
    if (subsets_out != nullptr) subsets_out->push_back(subsets[qi]);
  }
  if (stats != nullptr) {
    stats->initial_hypotheses = static_cast<int>(initial_hyps.size());
    stats->retained_points = static_cast<int>(retained.size());
    stats->degenerate_seeds = degenerate;
  }
  return out;
}

}  // namespace lsc
