#pragma once

/// Model selection in the hypothesis latent space (LSC-MSA): prune weak
/// hypotheses by entropy, recover one origin-line per structure, label the
/// surviving hypotheses with a small exact maximum-coverage program, pick
/// the heaviest hypothesis per label as the model instance, and assign data
/// points to instances.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "lsc/errors.hpp"
#include "lsc/geometry.hpp"
#include "lsc/latent.hpp"
#include "lsc/preference.hpp"

namespace lsc {

/// A one-dimensional subspace through the latent origin.
struct OriginLine {
  Eigen::VectorXd direction;  // unit vector
  int source_index = -1;      // index of the latent point it came from
};

enum class SelectorKind { Cover, Dbscan };
enum class LineSampling { DiverseLargestDistance, LargestDistance, UniformStride };

struct SelectorConfig {
  double beta = 0.8;       // origin-line membership threshold
  double p_hat = 0.99;     // hit probability for the sample-count formula
  double alpha_hat = 0.5;  // assumed bad-hypothesis ratio
  int k = 1;               // number of structures
  SelectorKind selector = SelectorKind::Cover;
  LineSampling line_sampling = LineSampling::DiverseLargestDistance;
  double dbscan_eps = 0.8;
  int dbscan_min_pts = 3;
  double inlier_sigmas = 2.5;  // final assignment threshold, in scale units
};

struct FitResult {
  std::vector<Hypothesis> instances;  // at most k, params verbatim from input
  std::vector<int> labels;            // per point: 0 outlier, else instance index
  std::map<std::string, double> diagnostics;
};

/// Number of origin-line generators to sample so that a good one is hit with
/// probability p_hat when a fraction alpha_hat of candidates is bad (eta
/// points per minimal subset; one for origin-lines). Never less than 1.
inline int origin_line_sample_count(double p_hat, double alpha_hat, int eta) {
  const double good = std::pow(1.0 - alpha_hat, eta);
  if (good >= 1.0) return 1;
  const double m = std::log1p(-p_hat) / std::log1p(-good);
  return std::max(1, static_cast<int>(std::ceil(m)));
}

/// Distance from a latent point to an origin-line: ||x|| * sin(angle), zero
/// for the origin itself. The cosine is clamped to [-1, 1] against rounding.
inline double origin_line_residual(const OriginLine& line,
                                   const Eigen::VectorXd& point) {
  if (line.direction.size() != point.size())
    throw DimensionMismatch("origin-line and point dimensions differ");
  const double d = point.norm();
  if (d <= 0.0) return 0.0;
  double c = point.dot(line.direction) / (d * line.direction.norm());
  c = std::clamp(c, -1.0, 1.0);
  return d * std::sqrt(std::max(1.0 - c * c, 0.0));
}

namespace detail {

struct CoverBest {
  long long objective = -1;
  std::vector<int> subset;
};

inline void cover_dfs(const std::vector<std::vector<uint64_t>>& members,
                      int next, int remaining, std::vector<int>& chosen,
                      std::vector<uint64_t>& acc, CoverBest& best) {
  const int m = static_cast<int>(members.size());
  for (int j = next; j < m; ++j) {
    std::vector<uint64_t> saved = acc;
    for (size_t w = 0; w < acc.size(); ++w) acc[w] |= members[static_cast<size_t>(j)][w];
    chosen.push_back(j);
    long long covered = 0;
    for (uint64_t word : acc) covered += __builtin_popcountll(word);
    // Strict improvement keeps the lexicographically first maximizer, since
    // subsets are visited in lexicographic order.
    if (covered > best.objective) {
      best.objective = covered;
      best.subset = chosen;
    }
    if (remaining > 1) cover_dfs(members, j + 1, remaining - 1, chosen, acc, best);
    chosen.pop_back();
    acc = std::move(saved);
  }
}

}  // namespace detail

/// Exact maximum coverage: choose at most k origin-lines maximizing the
/// number of latent points within beta of some chosen line. Enumerate all
/// subsets (small by construction); ties go to the lexicographically
/// smallest index set. Covered points are labeled by the 1-based position of
/// their closest selected line (ties to the lower position); uncovered
/// points get 0.
inline std::pair<std::vector<int>, std::vector<int>> solve_cover(
    const std::vector<Eigen::VectorXd>& points,
    const std::vector<OriginLine>& lines, double beta, int k) {
  const int n = static_cast<int>(points.size());
  const int m = static_cast<int>(lines.size());
  if (m == 0 || k < 1) return {{}, std::vector<int>(static_cast<size_t>(n), 0)};

  const size_t words = static_cast<size_t>((n + 63) / 64);
  std::vector<std::vector<uint64_t>> members(
      static_cast<size_t>(m), std::vector<uint64_t>(words, 0));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if (origin_line_residual(lines[static_cast<size_t>(j)],
                               points[static_cast<size_t>(i)]) <= beta)
        members[static_cast<size_t>(j)][static_cast<size_t>(i) / 64] |=
            uint64_t{1} << (static_cast<size_t>(i) % 64);

  detail::CoverBest best;
  std::vector<int> chosen;
  std::vector<uint64_t> acc(words, 0);
  detail::cover_dfs(members, 0, std::min(k, m), chosen, acc, best);

  std::vector<int> labels(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double best_r = std::numeric_limits<double>::infinity();
    int best_pos = 0;
    for (size_t pos = 0; pos < best.subset.size(); ++pos) {
      const double r = origin_line_residual(
          lines[static_cast<size_t>(best.subset[pos])], points[static_cast<size_t>(i)]);
      if (r <= beta && r < best_r) {
        best_r = r;
        best_pos = static_cast<int>(pos) + 1;
      }
    }
    labels[static_cast<size_t>(i)] = best_pos;
  }
  return {best.subset, labels};
}

/// Euclidean DBSCAN over latent points; alternate selector for the ablation.
/// Returns per-point cluster labels 1..C (0 = noise), clusters numbered in
/// first-touch order over ascending point index.
inline std::vector<int> dbscan_labels(const std::vector<Eigen::VectorXd>& points,
                                      double eps, int min_pts) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> neighbors(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((points[static_cast<size_t>(i)] - points[static_cast<size_t>(j)]).norm() <= eps)
        neighbors[static_cast<size_t>(i)].push_back(j);

  std::vector<int> labels(static_cast<size_t>(n), 0);
  std::vector<bool> visited(static_cast<size_t>(n), false);
  int cluster = 0;
  for (int i = 0; i < n; ++i) {
    if (visited[static_cast<size_t>(i)]) continue;
    visited[static_cast<size_t>(i)] = true;
    if (static_cast<int>(neighbors[static_cast<size_t>(i)].size()) < min_pts) continue;
    ++cluster;
    std::vector<int> frontier = neighbors[static_cast<size_t>(i)];
    labels[static_cast<size_t>(i)] = cluster;
    for (size_t f = 0; f < frontier.size(); ++f) {
      const int j = frontier[f];
      if (labels[static_cast<size_t>(j)] == 0) labels[static_cast<size_t>(j)] = cluster;
      if (visited[static_cast<size_t>(j)]) continue;
      visited[static_cast<size_t>(j)] = true;
      if (static_cast<int>(neighbors[static_cast<size_t>(j)].size()) >= min_pts)
        for (int q : neighbors[static_cast<size_t>(j)]) frontier.push_back(q);
    }
  }
  return labels;
}

namespace detail {

inline bool params_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

/// Robust per-instance noise scale: 1.4826 * median absolute residual over
/// the given residual set.
inline double mad_scale(std::vector<double> r) {
  if (r.empty()) return 1e-12;
  for (double& v : r) v = std::abs(v);
  const size_t mid = r.size() / 2;
  std::nth_element(r.begin(), r.begin() + static_cast<long>(mid), r.end());
  double med = r[mid];
  if (r.size() % 2 == 0) {
    std::nth_element(r.begin(), r.begin() + static_cast<long>(mid) - 1, r.end());
    med = 0.5 * (med + r[mid - 1]);
  }
  return std::max(1.4826 * med, 1e-12);
}

}  // namespace detail

/// LSC-MSA over the hypotheses produced by the sampler and the preference
/// matrix built on them. Labels are 0 for outliers and 1..|instances| for
/// instance inliers; instance parameters are selected, never refit.
inline FitResult lsc_msa(const std::vector<Hypothesis>& hypotheses,
                         const PreferenceMatrix& pref,
                         const std::vector<DataPoint>& points,
                         const SelectorConfig& cfg) {
  const int n = static_cast<int>(points.size());
  const int m = static_cast<int>(hypotheses.size());
  FitResult result;
  result.labels.assign(static_cast<size_t>(n), 0);
  result.diagnostics["hypotheses_total"] = m;

  const int rank = std::min<int>(cfg.k, static_cast<int>(std::min(pref.rows(), pref.cols())));
  const TruncatedSvd svd = truncated_svd(pref, rank);
  const LatentCoords mh = lss_coords(svd, LatentSide::Hypotheses);
  const LatentCoords dp = lss_coords(svd, LatentSide::DataPoints);

  // Step 3: drop hypotheses that carry little information.
  const std::vector<int> retained = entropy_prune_or_all(mh.origin_distances);
  result.diagnostics["hypotheses_retained"] = static_cast<double>(retained.size());

  std::vector<Eigen::VectorXd> latent(retained.size());
  for (size_t i = 0; i < retained.size(); ++i)
    latent[i] = mh.coords.row(retained[i]).transpose();

  // Step 4: origin-line generators among the retained latent points.
  const int m_target = origin_line_sample_count(cfg.p_hat, cfg.alpha_hat, 1);
  std::vector<size_t> order(retained.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return mh.origin_distances[retained[a]] > mh.origin_distances[retained[b]];
  });

  std::vector<OriginLine> lines;
  auto push_line = [&](size_t local) {
    const double norm = latent[local].norm();
    if (norm <= 0.0) return false;
    OriginLine line;
    line.direction = latent[local] / norm;
    line.source_index = retained[local];
    if (cfg.line_sampling == LineSampling::DiverseLargestDistance) {
      for (const auto& existing : lines)
        if (origin_line_residual(existing, latent[local]) <= cfg.beta) return false;
    }
    lines.push_back(std::move(line));
    return true;
  };
  if (cfg.line_sampling == LineSampling::UniformStride) {
    const size_t count = std::min<size_t>(static_cast<size_t>(m_target), order.size());
    const double stride = static_cast<double>(order.size()) / static_cast<double>(count);
    for (size_t j = 0; j < count; ++j)
      push_line(order[std::min(order.size() - 1,
                               static_cast<size_t>(j * stride))]);
  } else {
    for (size_t oi : order) {
      if (static_cast<int>(lines.size()) >= m_target) break;
      push_line(oi);
    }
  }
  result.diagnostics["origin_lines"] = static_cast<double>(lines.size());

  // Step 5: label retained hypotheses by the cover program (or DBSCAN).
  std::vector<int> hyp_labels;
  int group_count = 0;
  if (cfg.selector == SelectorKind::Cover) {
    auto [selected, labels] = solve_cover(latent, lines, cfg.beta, cfg.k);
    hyp_labels = std::move(labels);
    group_count = static_cast<int>(selected.size());
    long long covered = 0;
    for (int l : hyp_labels) covered += l != 0;
    result.diagnostics["cover_objective"] = static_cast<double>(covered);
  } else {
    hyp_labels = dbscan_labels(latent, cfg.dbscan_eps, cfg.dbscan_min_pts);
    int clusters = 0;
    for (int l : hyp_labels) clusters = std::max(clusters, l);
    // Keep at most k clusters, largest first (ties to the lower label).
    std::vector<std::pair<int, int>> sizes;  // (-count, label)
    for (int c = 1; c <= clusters; ++c) {
      int count = 0;
      for (int l : hyp_labels) count += l == c;
      sizes.emplace_back(-count, c);
    }
    std::sort(sizes.begin(), sizes.end());
    std::vector<int> relabel(static_cast<size_t>(clusters) + 1, 0);
    const int kept = std::min<int>(cfg.k, static_cast<int>(sizes.size()));
    for (int r = 0; r < kept; ++r)
      relabel[static_cast<size_t>(sizes[static_cast<size_t>(r)].second)] = r + 1;
    for (int& l : hyp_labels) l = l > 0 ? relabel[static_cast<size_t>(l)] : 0;
    group_count = kept;
    result.diagnostics["cover_objective"] = 0.0;
  }

  // Step 6: heaviest hypothesis per group becomes a model instance.
  for (int g = 1; g <= group_count; ++g) {
    int best = -1;
    for (size_t i = 0; i < retained.size(); ++i) {
      if (hyp_labels[i] != g) continue;
      const int idx = retained[i];
      if (best < 0 ||
          hypotheses[static_cast<size_t>(idx)].weight >
              hypotheses[static_cast<size_t>(best)].weight ||
          (hypotheses[static_cast<size_t>(idx)].weight ==
               hypotheses[static_cast<size_t>(best)].weight &&
           detail::params_less(hypotheses[static_cast<size_t>(idx)].params,
                               hypotheses[static_cast<size_t>(best)].params)))
        best = idx;
    }
    if (best >= 0) result.instances.push_back(hypotheses[static_cast<size_t>(best)]);
  }
  result.diagnostics["instances"] = static_cast<double>(result.instances.size());
  if (result.instances.empty()) return result;  // nothing covered anything

  // Step 7: assign points to instances. Each instance's noise scale is a
  // robust MAD over its share of the entropy-retained data points (the
  // inlier-rich rows of the same SVD), which keeps the threshold tied to the
  // structure's own noise rather than the global residual mix.
  const std::vector<int> point_retained = entropy_prune_or_all(dp.origin_distances);
  const size_t ni = result.instances.size();
  std::vector<std::vector<double>> inst_res(ni);
  for (size_t i = 0; i < ni; ++i)
    inst_res[i] = residuals(result.instances[i], points);

  std::vector<std::vector<double>> partition(ni);
  for (int idx : point_retained) {
    size_t best = 0;
    for (size_t i = 1; i < ni; ++i)
      if (inst_res[i][static_cast<size_t>(idx)] <
          inst_res[best][static_cast<size_t>(idx)])
        best = i;
    partition[best].push_back(inst_res[best][static_cast<size_t>(idx)]);
  }
  std::vector<double> thresholds(ni);
  for (size_t i = 0; i < ni; ++i) {
    const std::vector<double>& sample =
        partition[i].size() >= 5 ? partition[i] : inst_res[i];
    thresholds[i] = cfg.inlier_sigmas * detail::mad_scale(sample);
  }
  for (int p = 0; p < n; ++p) {
    size_t best = 0;
    for (size_t i = 1; i < ni; ++i)
      if (inst_res[i][static_cast<size_t>(p)] < inst_res[best][static_cast<size_t>(p)])
        best = i;
    if (inst_res[best][static_cast<size_t>(p)] <= thresholds[best])
      result.labels[static_cast<size_t>(p)] = static_cast<int>(best) + 1;
  }
  return result;
}

}  // namespace lsc
