#pragma once

/// Built-in synthetic datasets mirroring the line/circle benchmark regimes
/// (100 inliers per structure; noise 1.5 for lines, 0.1 for circles; gross
/// outliers at 50% of the total) plus a two-plane correspondence scene.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lsc/dataset.hpp"

namespace lsc {

namespace detail {

inline Eigen::VectorXd line_through(double x0, double y0, double x1, double y1) {
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::hypot(dx, dy);
  Eigen::VectorXd v(3);
  v << dy / len, -dx / len, 0.0;
  v[2] = -(v[0] * x0 + v[1] * y0);
  canonicalize_sign(v);
  return v;
}

inline Eigen::VectorXd circle_params(double cx, double cy, double r) {
  Eigen::VectorXd v(3);
  v << cx, cy, r;
  return v;
}

inline Eigen::VectorXd mat_params(const Eigen::Matrix3d& m) {
  Eigen::VectorXd v(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v[3 * r + c] = m(r, c);
  return v;
}

inline GeneratorSpec box_spec(ModelType kind, double extent, uint64_t seed) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.bounds_min = Eigen::Vector2d(0.0, 0.0);
  spec.bounds_max = Eigen::Vector2d(extent, extent);
  spec.seed = seed;
  return spec;
}

}  // namespace detail

/// Names accepted by preset_dataset.
inline std::vector<std::string> preset_names() {
  return {"line3", "line4", "line5", "line6", "circle3", "circle4",
          "circle5", "circle6", "homog2", "fund1"};
}

inline Dataset preset_dataset(const std::string& name, uint64_t seed) {
  using detail::line_through;
  using detail::circle_params;

  if (name == "line3" || name == "line4" || name == "line5") {
    GeneratorSpec spec = detail::box_spec(ModelType::Line, 1500.0, seed);
    spec.inlier_noise = 1.5;
    if (name == "line3" || name == "line5") {
      spec.structures = {line_through(90, 180, 1410, 1200),
                         line_through(90, 1290, 1380, 120),
                         line_through(750, 60, 780, 1440)};
    } else {
      spec.structures = {line_through(60, 300, 1440, 420),
                         line_through(60, 750, 1440, 870),
                         line_through(180, 60, 360, 1440),
                         line_through(900, 1440, 1380, 60)};
    }
    if (name == "line5") {
      spec.structures.push_back(line_through(60, 750, 1440, 750));
      spec.structures.push_back(line_through(300, 60, 1440, 1380));
    }
    spec.outlier_count = 100 * static_cast<int>(spec.structures.size());
    return generate(spec);
  }
  if (name == "line6") {
    GeneratorSpec spec = detail::box_spec(ModelType::Line, 1600.0, seed);
    spec.inlier_noise = 1.5;
    spec.structures = {line_through(60, 60, 1540, 1540),
                       line_through(60, 1540, 1540, 60),
                       line_through(800, 60, 800, 1540),
                       line_through(60, 800, 1540, 800),
                       line_through(60, 480, 1540, 320),
                       line_through(480, 60, 320, 1540)};
    spec.outlier_count = 600;
    return generate(spec);
  }
  if (name == "circle3" || name == "circle4") {
    GeneratorSpec spec = detail::box_spec(ModelType::Circle, 500.0, seed);
    spec.inlier_noise = 0.1;
    if (name == "circle3")
      spec.structures = {circle_params(150, 150, 100), circle_params(360, 170, 95),
                         circle_params(250, 360, 105)};
    else
      spec.structures = {circle_params(130, 130, 85), circle_params(370, 130, 90),
                         circle_params(130, 370, 95), circle_params(370, 370, 85)};
    spec.outlier_count = 100 * static_cast<int>(spec.structures.size());
    return generate(spec);
  }
  if (name == "circle5" || name == "circle6") {
    GeneratorSpec spec = detail::box_spec(ModelType::Circle, 700.0, seed);
    spec.inlier_noise = 0.1;
    if (name == "circle5")
      spec.structures = {circle_params(150, 150, 85), circle_params(520, 140, 80),
                         circle_params(340, 330, 70), circle_params(160, 520, 90),
                         circle_params(530, 520, 75)};
    else
      spec.structures = {circle_params(150, 150, 85), circle_params(500, 140, 80),
                         circle_params(170, 480, 90), circle_params(520, 500, 75),
                         circle_params(350, 320, 65), circle_params(350, 620, 60)};
    spec.outlier_count = 100 * static_cast<int>(spec.structures.size());
    return generate(spec);
  }
  if (name == "homog2") {
    // Two planes with distinct source regions, merged into one scene with
    // 30% gross outliers drawn over the full frame.
    Eigen::Matrix3d h1, h2;
    h1 << 0.95, 0.05, 40, -0.03, 0.97, 12, 1e-4, -5e-5, 1.0;
    h2 << 1.05, -0.08, -30, 0.06, 1.02, 25, -8e-5, 1.2e-4, 1.0;
    GeneratorSpec left;
    left.kind = ModelType::Homography;
    left.structures = {detail::mat_params(h1)};
    left.inliers_per_structure = 100;
    left.inlier_noise = 1.0;
    left.outlier_count = 0;
    left.bounds_min = Eigen::Vector4d(60, 60, 0, 0);
    left.bounds_max = Eigen::Vector4d(300, 420, 640, 480);
    left.seed = seed;
    GeneratorSpec right = left;
    right.structures = {detail::mat_params(h2)};
    right.bounds_min = Eigen::Vector4d(340, 60, 0, 0);
    right.bounds_max = Eigen::Vector4d(580, 420, 640, 480);
    right.seed = seed + 1;

    Dataset a = generate(left);
    Dataset b = generate(right);
    Dataset ds;
    ds.kind = ModelType::Homography;
    ds.structure_count = 2;
    std::vector<int> labels;
    for (size_t i = 0; i < a.points.size(); ++i) {
      a.points[i].id = static_cast<int>(ds.points.size());
      ds.points.push_back(a.points[i]);
      labels.push_back(1);
    }
    for (size_t i = 0; i < b.points.size(); ++i) {
      b.points[i].id = static_cast<int>(ds.points.size());
      ds.points.push_back(b.points[i]);
      labels.push_back(2);
    }
    Rng rng(seed + 2);
    for (int i = 0; i < 86; ++i) {  // 86/286 = 30% of the total
      DataPoint p = DataPoint::correspondence(
          rng.uniform(0, 640), rng.uniform(0, 480), rng.uniform(0, 640),
          rng.uniform(0, 480), static_cast<int>(ds.points.size()));
      ds.points.push_back(std::move(p));
      labels.push_back(0);
    }
    ds.ground_truth = std::move(labels);
    ds.meta["generator"] = "mt19937_64";
    ds.meta["seed"] = std::to_string(seed);
    ds.meta["model"] = "homography";
    ds.meta["structures"] = "2";
    ds.meta["inlier_noise"] = "1.0";
    ds.meta["outliers"] = "86";
    return ds;
  }
  if (name == "fund1") {
    // One epipolar geometry from a lateral stereo pair, 40% outliers.
    Eigen::Matrix3d f;
    // F for cameras K[I|0], K[I|t] with t = (1, 0.1, 0.02), K = diag(500,500,1)
    // plus principal point (320,240): F = K2^-T [t]x R K1^-1 with R = I.
    Eigen::Matrix3d k;
    k << 500, 0, 320, 0, 500, 240, 0, 0, 1;
    Eigen::Vector3d t(1.0, 0.1, 0.02);
    Eigen::Matrix3d tx;
    tx << 0, -t[2], t[1], t[2], 0, -t[0], -t[1], t[0], 0;
    f = k.inverse().transpose() * tx * k.inverse();
    f /= f.norm();
    GeneratorSpec spec;
    spec.kind = ModelType::FundamentalMatrix;
    spec.structures = {detail::mat_params(f)};
    spec.inliers_per_structure = 150;
    spec.inlier_noise = 1.0;
    spec.outlier_count = 100;
    spec.bounds_min = Eigen::Vector4d(0, 0, 0, 0);
    spec.bounds_max = Eigen::Vector4d(640, 480, 640, 480);
    spec.seed = seed;
    return generate(spec);
  }
  throw InvalidSpec("unknown preset '" + name + "'");
}

}  // namespace lsc
