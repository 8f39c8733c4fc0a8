#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written from scratch (no calls into the
// code under test) and favors clarity over speed.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

// --------------------------------------------------------------------------
// Full SVD via one-sided Jacobi rotations (Hestenes). Returns singular
// values sorted descending. Independent of Eigen's bidiagonalization path.
// --------------------------------------------------------------------------
struct JacobiSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

inline JacobiSvd jacobi_svd(const Eigen::MatrixXd& input) {
  // Work on a tall matrix; transpose back at the end if needed.
  const bool transposed = input.rows() < input.cols();
  Eigen::MatrixXd a = transposed ? input.transpose() : input;
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        off = std::max(off, std::abs(gamma) / std::sqrt(std::max(alpha * beta, 1e-300)));
        if (std::abs(gamma) < 1e-15 * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          const double ap = a(r, p), aq = a(r, q);
          a(r, p) = c * ap - s * aq;
          a(r, q) = s * ap + c * aq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    }
    if (off < 1e-14) break;
  }

  Eigen::VectorXd sv(n);
  Eigen::MatrixXd u(a.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sv[j] = a.col(j).norm();
    u.col(j) = sv[j] > 1e-300 ? (a.col(j) / sv[j]).eval()
                              : Eigen::VectorXd::Zero(a.rows()).eval();
  }
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sv[x] > sv[y]; });
  JacobiSvd out;
  out.s.resize(n);
  out.u.resize(a.rows(), n);
  out.v.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.s[j] = sv[order[static_cast<size_t>(j)]];
    out.u.col(j) = u.col(order[static_cast<size_t>(j)]);
    out.v.col(j) = v.col(order[static_cast<size_t>(j)]);
  }
  if (transposed) std::swap(out.u, out.v);
  return out;
}

// --------------------------------------------------------------------------
// Exhaustive k-nearest-neighbor search with (distance, index) ordering.
// --------------------------------------------------------------------------
inline std::vector<std::vector<int>> brute_knn(const Eigen::MatrixXd& coords,
                                               int rho) {
  const int n = static_cast<int>(coords.rows());
  std::vector<std::vector<int>> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < n; ++j)
      if (j != i) d.emplace_back((coords.row(i) - coords.row(j)).norm(), j);
    std::sort(d.begin(), d.end());
    for (int r = 0; r < rho; ++r) out[static_cast<size_t>(i)].push_back(d[static_cast<size_t>(r)].second);
  }
  return out;
}

// --------------------------------------------------------------------------
// Scalar transcription of the entropy pruning formulas.
// --------------------------------------------------------------------------
inline std::vector<int> entropy_prune_reference(const std::vector<double>& d) {
  const size_t n = d.size();
  const double dmax = *std::max_element(d.begin(), d.end());
  std::vector<double> g(n);
  double gsum = 0;
  for (size_t i = 0; i < n; ++i) {
    g[i] = dmax - d[i];
    gsum += g[i];
  }
  double entropy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double q = g[i] / gsum;
    if (q > 0) entropy += -q * std::log(q);
  }
  std::vector<int> keep;
  for (size_t i = 0; i < n; ++i) {
    const double q = g[i] / gsum;
    const bool retained = q == 0.0 || -std::log(q) > entropy;
    if (retained) keep.push_back(static_cast<int>(i));
  }
  return keep;
}

// --------------------------------------------------------------------------
// Adaptive Simpson quadrature.
// --------------------------------------------------------------------------
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// --------------------------------------------------------------------------
// Brute-force maximum coverage via bitmask enumeration over all subsets of
// size <= k (set-based, no shared code with the DFS in the library).
// --------------------------------------------------------------------------
inline long long brute_force_cover(const std::vector<std::vector<bool>>& member,
                                   int k) {
  const int m = static_cast<int>(member.size());
  const int n = m ? static_cast<int>(member[0].size()) : 0;
  long long best = 0;
  for (uint32_t mask = 1; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) > k) continue;
    long long covered = 0;
    for (int i = 0; i < n; ++i) {
      bool hit = false;
      for (int j = 0; j < m && !hit; ++j)
        if ((mask >> j) & 1u) hit = member[static_cast<size_t>(j)][static_cast<size_t>(i)];
      covered += hit;
    }
    best = std::max(best, covered);
  }
  return best;
}

// --------------------------------------------------------------------------
// Segmentation error by exhaustive permutation over predicted labels
// (useful up to ~6 structures).
// --------------------------------------------------------------------------
inline double brute_force_se(const std::vector<int>& pred,
                             const std::vector<int>& truth) {
  int kp = 0, kt = 0;
  for (int l : pred) kp = std::max(kp, l);
  for (int l : truth) kt = std::max(kt, l);
  const int dim = std::max(kp, kt);
  std::vector<int> perm(static_cast<size_t>(dim));
  std::iota(perm.begin(), perm.end(), 1);
  size_t best = 0;
  do {
    size_t correct = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
      const int mapped = pred[i] == 0 ? 0 : perm[static_cast<size_t>(pred[i] - 1)];
      correct += mapped == truth[i];
    }
    best = std::max(best, correct);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 100.0 * static_cast<double>(pred.size() - best) /
         static_cast<double>(pred.size());
}

// --------------------------------------------------------------------------
// Grid-search circle fit minimizing the summed squared algebraic error,
// refined over three zoom levels.
// --------------------------------------------------------------------------
struct Circle {
  double cx, cy, r;
};

inline Circle grid_search_circle(const std::vector<double>& xs,
                                 const std::vector<double>& ys, double cx0,
                                 double cy0, double r0, double radius0) {
  Circle best{cx0, cy0, r0};
  double span = radius0;
  auto cost = [&](double cx, double cy, double r) {
    double acc = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double d = std::hypot(xs[i] - cx, ys[i] - cy) - r;
      acc += d * d;
    }
    return acc;
  };
  double best_cost = cost(best.cx, best.cy, best.r);
  for (int level = 0; level < 4; ++level) {
    const int steps = 20;
    Circle center = best;
    for (int a = -steps; a <= steps; ++a)
      for (int b = -steps; b <= steps; ++b)
        for (int c = -steps; c <= steps; ++c) {
          const Circle cand{center.cx + span * a / steps,
                            center.cy + span * b / steps,
                            center.r + span * c / steps};
          if (cand.r <= 0) continue;
          const double cc = cost(cand.cx, cand.cy, cand.r);
          if (cc < best_cost) {
            best_cost = cc;
            best = cand;
          }
        }
    span /= steps * 0.5;
  }
  return best;
}

}  // namespace oracle
