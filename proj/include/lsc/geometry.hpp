#pragma once

/// Model kernels: minimal-subset solvers, least-squares refits and residual
/// functions for lines, circles, homographies and fundamental matrices.
///
/// All solvers return parameter vectors under a fixed canonical form so that
/// identical inputs produce bitwise-identical outputs:
///   line         [a b c],  a*x + b*y + c = 0,  a^2 + b^2 = 1
///   circle       [a b r],  center (a,b), radius r > 0
///   homography   3x3 row-major, Frobenius norm 1
///   fundamental  3x3 row-major, Frobenius norm 1, rank <= 2
/// and the first nonzero component (tolerance 1e-12) is positive.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lsc/errors.hpp"

namespace lsc {

enum class PointKind { Point2D, Correspondence };

enum class ModelType { Line, Circle, Homography, FundamentalMatrix };

/// Size of a minimal subset for the model.
inline int minimal_subset_size(ModelType t) {
  switch (t) {
    case ModelType::Line: return 2;
    case ModelType::Circle: return 3;
    case ModelType::Homography: return 4;
    case ModelType::FundamentalMatrix: return 8;
  }
  return 0;
}

/// Length of the parameter vector for the model.
inline int param_dim(ModelType t) {
  switch (t) {
    case ModelType::Line: return 3;
    case ModelType::Circle: return 3;
    case ModelType::Homography: return 9;
    case ModelType::FundamentalMatrix: return 9;
  }
  return 0;
}

/// Data-point kind the model operates on.
inline PointKind point_kind(ModelType t) {
  return (t == ModelType::Line || t == ModelType::Circle)
             ? PointKind::Point2D
             : PointKind::Correspondence;
}

inline const char* model_name(ModelType t) {
  switch (t) {
    case ModelType::Line: return "line";
    case ModelType::Circle: return "circle";
    case ModelType::Homography: return "homography";
    case ModelType::FundamentalMatrix: return "fundamental";
  }
  return "?";
}

/// A 2-D point (x, y) or a 4-D image correspondence (x, y, x', y').
struct DataPoint {
  PointKind kind = PointKind::Point2D;
  Eigen::VectorXd coords;
  int id = -1;

  static DataPoint point2d(double x, double y, int id = -1) {
    DataPoint p;
    p.kind = PointKind::Point2D;
    p.coords = Eigen::Vector2d(x, y);
    p.id = id;
    return p;
  }
  static DataPoint correspondence(double x, double y, double x2, double y2,
                                  int id = -1) {
    DataPoint p;
    p.kind = PointKind::Correspondence;
    p.coords = Eigen::Vector4d(x, y, x2, y2);
    p.id = id;
    return p;
  }
};

/// A candidate model: parameter vector plus the inlier noise scale and
/// weighting value attached by the sampler (0 until set).
struct Hypothesis {
  ModelType kind = ModelType::Line;
  Eigen::VectorXd params;
  double scale = 0.0;
  double weight = 0.0;
  int id = -1;
};

namespace detail {

constexpr double kSignTol = 1e-12;

/// Flip the vector so its first component larger than kSignTol in magnitude
/// is positive.
inline void canonicalize_sign(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSignTol) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

inline void check_point_kind(ModelType model, const DataPoint& p) {
  if (p.kind != point_kind(model))
    throw KindMismatch("data point kind does not match model");
}

/// Similarity transform moving the centroid to the origin and scaling the
/// mean distance to sqrt(2) (Hartley normalization for DLT conditioning).
inline Eigen::Matrix3d hartley_transform(const std::vector<DataPoint>& pts,
                                         int offset) {
  double cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p.coords[offset];
    cy += p.coords[offset + 1];
  }
  const double n = static_cast<double>(pts.size());
  cx /= n;
  cy /= n;
  double mean_dist = 0;
  for (const auto& p : pts)
    mean_dist += std::hypot(p.coords[offset] - cx, p.coords[offset + 1] - cy);
  mean_dist /= n;
  const double s = std::sqrt(2.0) / std::max(mean_dist, 1e-15);
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

/// Right null vector of a (by smallest singular value). Throws when the two
/// smallest effective singular values coincide beyond tolerance (solution
/// not unique). For rows < cols the trailing columns of V pair with implicit
/// zero singular values, so the check uses the computed tail instead.
inline Eigen::VectorXd smallest_right_singular(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[0] <= 0.0) throw DegenerateSubset("zero design matrix");
  if (a.rows() >= a.cols()) {
    const Eigen::Index last = sv.size() - 1;
    if ((sv[last - 1] - sv[last]) <= 1e-12 * sv[0])
      throw DegenerateSubset("DLT solution not unique (repeated singular value)");
  } else {
    if (a.rows() + 1 < a.cols())
      throw DegenerateSubset("null space dimension > 1");
    if (sv[sv.size() - 1] <= 1e-12 * sv[0])
      throw DegenerateSubset("DLT solution not unique (rank deficient rows)");
  }
  return svd.matrixV().col(a.cols() - 1);
}

inline Hypothesis make_hypothesis(ModelType kind, Eigen::VectorXd params) {
  canonicalize_sign(params);
  Hypothesis h;
  h.kind = kind;
  h.params = std::move(params);
  return h;
}

inline Hypothesis fit_line_two_points(const DataPoint& p, const DataPoint& q) {
  const double dx = q.coords[0] - p.coords[0];
  const double dy = q.coords[1] - p.coords[1];
  const double len = std::hypot(dx, dy);
  if (len <= 1e-15) throw DegenerateSubset("coincident points for line");
  Eigen::VectorXd v(3);
  v[0] = dy / len;
  v[1] = -dx / len;
  v[2] = -(v[0] * p.coords[0] + v[1] * p.coords[1]);
  return make_hypothesis(ModelType::Line, std::move(v));
}

/// Total-least-squares line through >= 2 points.
inline Hypothesis fit_line_tls(const std::vector<DataPoint>& pts) {
  const double n = static_cast<double>(pts.size());
  double cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p.coords[0];
    cy += p.coords[1];
  }
  cx /= n;
  cy /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pts) {
    const double x = p.coords[0] - cx, y = p.coords[1] - cy;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  // Normal = eigenvector of the smallest eigenvalue of the 2x2 scatter.
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  const double lam_min = tr / 2.0 - disc;
  const double lam_max = tr / 2.0 + disc;
  if (lam_max <= 1e-30) throw DegenerateSubset("coincident points for line");
  double a, b;
  if (std::abs(sxx - lam_min) >= std::abs(syy - lam_min)) {
    a = sxy;
    b = -(sxx - lam_min);
  } else {
    a = syy - lam_min;
    b = -sxy;
  }
  const double len = std::hypot(a, b);
  if (len <= 1e-15) throw DegenerateSubset("degenerate line scatter");
  Eigen::VectorXd v(3);
  v[0] = a / len;
  v[1] = b / len;
  v[2] = -(v[0] * cx + v[1] * cy);
  return make_hypothesis(ModelType::Line, std::move(v));
}

/// Kasa algebraic circle fit: linear least squares on
/// x^2 + y^2 + D x + E y + F = 0. Interpolates exactly for 3 points.
inline Hypothesis fit_circle_kasa(const std::vector<DataPoint>& pts) {
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pts[i].coords[0], y = pts[i].coords[1];
    a(i, 0) = x;
    a(i, 1) = y;
    a(i, 2) = 1.0;
    rhs[i] = -(x * x + y * y);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] <= 1e-10 * std::max(sv[0], 1.0))
    throw DegenerateSubset("collinear or coincident points for circle");
  const Eigen::Vector3d sol = svd.solve(rhs);
  const double cx = -sol[0] / 2.0, cy = -sol[1] / 2.0;
  const double r2 = cx * cx + cy * cy - sol[2];
  if (!(r2 > 0.0)) throw DegenerateSubset("non-positive circle radius");
  Eigen::VectorXd v(3);
  v[0] = cx;
  v[1] = cy;
  v[2] = std::sqrt(r2);
  // Radius is kept positive, so no sign pass is needed; the canonical form
  // requirement is satisfied whenever (cx, cy) != 0 as well.
  Hypothesis h;
  h.kind = ModelType::Circle;
  h.params = std::move(v);
  return h;
}

/// Normalized DLT homography over >= 4 correspondences.
inline Hypothesis fit_homography_dlt(const std::vector<DataPoint>& pts) {
  const Eigen::Matrix3d t1 = hartley_transform(pts, 0);
  const Eigen::Matrix3d t2 = hartley_transform(pts, 2);
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = t1 * Eigen::Vector3d(pts[i].coords[0],
                                                   pts[i].coords[1], 1.0);
    const Eigen::Vector3d q = t2 * Eigen::Vector3d(pts[i].coords[2],
                                                   pts[i].coords[3], 1.0);
    const double x = p[0], y = p[1], u = q[0], v = q[1];
    a.row(2 * i) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    a.row(2 * i + 1) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
  }
  const Eigen::VectorXd hvec = smallest_right_singular(a);
  Eigen::Matrix3d hn;
  hn << hvec[0], hvec[1], hvec[2], hvec[3], hvec[4], hvec[5], hvec[6], hvec[7],
      hvec[8];
  Eigen::Matrix3d h = t2.inverse() * hn * t1;
  h /= h.norm();
  Eigen::VectorXd flat(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) flat[3 * r + c] = h(r, c);
  return make_hypothesis(ModelType::Homography, std::move(flat));
}

/// Normalized 8-point fundamental matrix with rank-2 projection.
inline Hypothesis fit_fundamental_eight_point(const std::vector<DataPoint>& pts) {
  const Eigen::Matrix3d t1 = hartley_transform(pts, 0);
  const Eigen::Matrix3d t2 = hartley_transform(pts, 2);
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = t1 * Eigen::Vector3d(pts[i].coords[0],
                                                   pts[i].coords[1], 1.0);
    const Eigen::Vector3d q = t2 * Eigen::Vector3d(pts[i].coords[2],
                                                   pts[i].coords[3], 1.0);
    const double x = p[0], y = p[1], u = q[0], v = q[1];
    a.row(i) << u * x, u * y, u, v * x, v * y, v, x, y, 1;
  }
  const Eigen::VectorXd fvec = smallest_right_singular(a);
  Eigen::Matrix3d fn;
  fn << fvec[0], fvec[1], fvec[2], fvec[3], fvec[4], fvec[5], fvec[6], fvec[7],
      fvec[8];
  // Enforce rank 2 before denormalizing.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(fn,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d sv = svd.singularValues();
  sv[2] = 0.0;
  fn = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
  Eigen::Matrix3d f = t2.transpose() * fn * t1;
  const double norm = f.norm();
  if (norm <= 1e-15) throw DegenerateSubset("zero fundamental matrix");
  f /= norm;
  Eigen::VectorXd flat(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) flat[3 * r + c] = f(r, c);
  return make_hypothesis(ModelType::FundamentalMatrix, std::move(flat));
}

inline Eigen::Matrix3d as_matrix(const Eigen::VectorXd& params) {
  Eigen::Matrix3d m;
  m << params[0], params[1], params[2], params[3], params[4], params[5],
      params[6], params[7], params[8];
  return m;
}

}  // namespace detail

/// Fit a hypothesis that exactly interpolates a minimal subset.
/// The subset size must equal minimal_subset_size(kind).
inline Hypothesis minimal_fit(ModelType kind,
                              const std::vector<DataPoint>& subset) {
  const int rho = minimal_subset_size(kind);
  if (static_cast<int>(subset.size()) != rho)
    throw DegenerateSubset("minimal_fit subset size mismatch");
  for (const auto& p : subset) detail::check_point_kind(kind, p);
  for (size_t i = 0; i < subset.size(); ++i)
    for (size_t j = i + 1; j < subset.size(); ++j)
      if ((subset[i].coords - subset[j].coords).norm() <= 1e-15)
        throw DegenerateSubset("repeated point in minimal subset");
  switch (kind) {
    case ModelType::Line:
      return detail::fit_line_two_points(subset[0], subset[1]);
    case ModelType::Circle:
      return detail::fit_circle_kasa(subset);
    case ModelType::Homography:
      return detail::fit_homography_dlt(subset);
    case ModelType::FundamentalMatrix:
      return detail::fit_fundamental_eight_point(subset);
  }
  throw Error("unreachable");
}

/// Algebraic least-squares fit over any number of points >= the minimal
/// subset size: TLS line, Kasa circle, DLT homography, 8-point fundamental.
inline Hypothesis least_squares_fit(ModelType kind,
                                    const std::vector<DataPoint>& points) {
  if (static_cast<int>(points.size()) < minimal_subset_size(kind))
    throw DegenerateSubset("too few points for least_squares_fit");
  for (const auto& p : points) detail::check_point_kind(kind, p);
  switch (kind) {
    case ModelType::Line:
      return detail::fit_line_tls(points);
    case ModelType::Circle:
      return detail::fit_circle_kasa(points);
    case ModelType::Homography:
      return detail::fit_homography_dlt(points);
    case ModelType::FundamentalMatrix:
      return detail::fit_fundamental_eight_point(points);
  }
  throw Error("unreachable");
}

/// Point-to-model residual: perpendicular distance for lines, absolute
/// distance to the ring for circles, Sampson distance for homographies and
/// fundamental matrices. Always finite and >= 0.
inline double residual(const Hypothesis& h, const DataPoint& s) {
  detail::check_point_kind(h.kind, s);
  switch (h.kind) {
    case ModelType::Line:
      return std::abs(h.params[0] * s.coords[0] + h.params[1] * s.coords[1] +
                      h.params[2]);
    case ModelType::Circle:
      return std::abs(std::hypot(s.coords[0] - h.params[0],
                                 s.coords[1] - h.params[1]) -
                      h.params[2]);
    case ModelType::Homography: {
      // First-order Sampson approximation of the transfer error.
      const Eigen::Matrix3d m = detail::as_matrix(h.params);
      const double x = s.coords[0], y = s.coords[1];
      const double u = s.coords[2], v = s.coords[3];
      const Eigen::Vector3d hp = m * Eigen::Vector3d(x, y, 1.0);
      const Eigen::Vector2d e(hp[0] - u * hp[2], hp[1] - v * hp[2]);
      Eigen::Matrix<double, 2, 4> j;
      j << m(0, 0) - u * m(2, 0), m(0, 1) - u * m(2, 1), -hp[2], 0,
          m(1, 0) - v * m(2, 0), m(1, 1) - v * m(2, 1), 0, -hp[2];
      const Eigen::Matrix2d jjt = j * j.transpose();
      const double det = jjt.determinant();
      if (!(det > 1e-30)) return e.norm();
      const Eigen::Vector2d lam = jjt.inverse() * e;
      return std::sqrt(std::max(e.dot(lam), 0.0));
    }
    case ModelType::FundamentalMatrix: {
      const Eigen::Matrix3d m = detail::as_matrix(h.params);
      const Eigen::Vector3d p(s.coords[0], s.coords[1], 1.0);
      const Eigen::Vector3d q(s.coords[2], s.coords[3], 1.0);
      const Eigen::Vector3d fp = m * p;
      const Eigen::Vector3d ftq = m.transpose() * q;
      const double num = q.dot(fp);
      const double den =
          fp[0] * fp[0] + fp[1] * fp[1] + ftq[0] * ftq[0] + ftq[1] * ftq[1];
      if (den <= 1e-30) return 0.0;
      return std::abs(num) / std::sqrt(den);
    }
  }
  throw Error("unreachable");
}

/// Residuals of one hypothesis against a point list, in input order.
inline std::vector<double> residuals(const Hypothesis& h,
                                     const std::vector<DataPoint>& points) {
  std::vector<double> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) out[i] = residual(h, points[i]);
  return out;
}

}  // namespace lsc
