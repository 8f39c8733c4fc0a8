#pragma once

/// Preference matrix: soft membership of every data point in every model
/// hypothesis, p = exp(-residual / psi).

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "lsc/errors.hpp"
#include "lsc/geometry.hpp"
#include "lsc/parallel.hpp"

namespace lsc {

struct PreferenceMatrix {
  Eigen::MatrixXd values;  // n points x m hypotheses
  double psi = 0.0;
  std::vector<int> point_ids;
  std::vector<int> hypothesis_ids;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// exp(-d/psi). Strictly decreasing in d, equals 1 iff d == 0. Residuals are
/// not clipped, so very large d may underflow to 0 in floating point.
inline double preference_value(double d, double psi) {
  if (!(psi > 0.0)) throw InvalidThreshold("psi must be > 0");
  return std::exp(-d / psi);
}

inline PreferenceMatrix build_preference_matrix(
    const std::vector<DataPoint>& points,
    const std::vector<Hypothesis>& hypotheses, double psi) {
  if (!(psi > 0.0)) throw InvalidThreshold("psi must be > 0");
  if (points.empty() || hypotheses.empty())
    throw Error("preference matrix needs points and hypotheses");
  PreferenceMatrix p;
  p.psi = psi;
  p.values.resize(static_cast<Eigen::Index>(points.size()),
                  static_cast<Eigen::Index>(hypotheses.size()));
  parallel_for(points.size(), [&](size_t i) {
    for (size_t j = 0; j < hypotheses.size(); ++j)
      p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::exp(-residual(hypotheses[j], points[i]) / psi);
  });
  p.point_ids.reserve(points.size());
  for (const auto& s : points) p.point_ids.push_back(s.id);
  p.hypothesis_ids.reserve(hypotheses.size());
  for (const auto& h : hypotheses) p.hypothesis_ids.push_back(h.id);
  return p;
}

}  // namespace lsc
