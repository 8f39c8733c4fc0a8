#pragma once

/// Latent semantic spaces over the preference matrix: truncated SVD, the
/// data-point side (rows of U*S) and the hypothesis side (rows of V*S),
/// per-row origin distances, and entropy-based pruning of low-information
/// rows.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <vector>

#include "lsc/errors.hpp"
#include "lsc/preference.hpp"

namespace lsc {

struct TruncatedSvd {
  Eigen::MatrixXd u;  // n x k, orthonormal columns
  Eigen::VectorXd s;  // k singular values, non-increasing
  Eigen::MatrixXd v;  // m x k, orthonormal columns
  int k = 0;
};

enum class LatentSide { DataPoints, Hypotheses };

struct LatentCoords {
  LatentSide side = LatentSide::DataPoints;
  Eigen::MatrixXd coords;            // (n or m) x k
  Eigen::VectorXd origin_distances;  // per-row Euclidean norm
};

/// Top-k SVD factors of the preference matrix with a deterministic sign
/// convention: each singular pair is flipped so that the U-column entry of
/// largest magnitude is positive (ties resolved by lowest row index).
inline TruncatedSvd truncated_svd(const PreferenceMatrix& p, int k) {
  const Eigen::Index n = p.rows(), m = p.cols();
  if (k < 1 || k > std::min(n, m))
    throw RankTooLarge("k outside [1, min(n, m)]");
  if (p.values.lpNorm<Eigen::Infinity>() <= 1e-300)
    throw ZeroMatrix("preference matrix is numerically zero");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(p.values,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.k = k;
  out.u = svd.matrixU().leftCols(k);
  out.s = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(out.u(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (out.u(best, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

/// Latent coordinates of one side: rows of U*diag(S) for data points or
/// V*diag(S) for hypotheses, with their origin distances.
inline LatentCoords lss_coords(const TruncatedSvd& svd, LatentSide side) {
  LatentCoords out;
  out.side = side;
  out.coords = (side == LatentSide::DataPoints ? svd.u : svd.v) *
               svd.s.asDiagonal();
  out.origin_distances = out.coords.rowwise().norm();
  return out;
}

/// Entropy pruning of origin distances. Gaps g_i = max(d) - d_i turn into a
/// probability q_i = g_i / sum(g); a row survives when its information
/// -log(q_i) exceeds the entropy -sum(q log q). Rows at the maximum distance
/// have q = 0, carry infinite information, and are always retained.
/// Throws DegenerateDistances when every distance is equal.
inline std::vector<int> entropy_prune(const std::vector<double>& distances) {
  if (distances.empty()) throw Error("entropy_prune on empty input");
  double dmax = distances[0];
  for (double d : distances) dmax = std::max(dmax, d);
  double gap_sum = 0.0;
  for (double d : distances) gap_sum += dmax - d;
  if (gap_sum <= 0.0)
    throw DegenerateDistances("all origin distances are equal");
  double entropy = 0.0;
  for (double d : distances) {
    const double q = (dmax - d) / gap_sum;
    if (q > 0.0) entropy -= q * std::log(q);
  }
  std::vector<int> retained;
  for (size_t i = 0; i < distances.size(); ++i) {
    const double q = (dmax - distances[i]) / gap_sum;
    const double info =
        q > 0.0 ? -std::log(q) : std::numeric_limits<double>::infinity();
    if (info > entropy) retained.push_back(static_cast<int>(i));
  }
  return retained;
}

inline std::vector<int> entropy_prune(const Eigen::VectorXd& distances) {
  return entropy_prune(
      std::vector<double>(distances.data(), distances.data() + distances.size()));
}

/// entropy_prune that falls back to retaining every index when the
/// distances are degenerate (the behaviour the fitting pipeline wants).
inline std::vector<int> entropy_prune_or_all(const Eigen::VectorXd& distances) {
  try {
    return entropy_prune(distances);
  } catch (const DegenerateDistances&) {
    std::vector<int> all(static_cast<size_t>(distances.size()));
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
  }
}

}  // namespace lsc
