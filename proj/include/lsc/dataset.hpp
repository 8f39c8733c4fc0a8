#pragma once

/// Datasets: deterministic synthetic generators for the line/circle/
/// homography regimes, CSV/JSON loaders and writers, and the segmentation
/// error metric.
///
/// All randomness comes from one named generator so that a (spec, seed) pair
/// reproduces the same dataset everywhere: std::mt19937_64 with
/// uniform01 = (next() >> 11) * 2^-53 and Box-Muller for Gaussians. The
/// generator identity is part of the dataset contract, not a tunable.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsc/errors.hpp"
#include "lsc/geometry.hpp"

namespace lsc {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double gaussian(double mu, double sigma) {
    // Box-Muller; u1 shifted away from 0 so the log stays finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * M_PI * u2);
  }
  /// Unbiased integer in [0, n) by rejection.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX / n * n;
    uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

struct Dataset {
  std::vector<DataPoint> points;
  std::optional<std::vector<int>> ground_truth;  // 0 = outlier
  ModelType kind = ModelType::Line;
  int structure_count = 0;
  std::map<std::string, std::string> meta;
};

struct GeneratorSpec {
  ModelType kind = ModelType::Line;
  std::vector<Eigen::VectorXd> structures;  // one parameter vector each
  int inliers_per_structure = 100;
  double inlier_noise = 0.0;
  int outlier_count = 0;
  Eigen::VectorXd bounds_min;  // dim 2 (points) or 4 (correspondences)
  Eigen::VectorXd bounds_max;
  uint64_t seed = 0;
};

namespace detail {

/// Longest chord of the line a*x + b*y + c = 0 inside the box.
inline std::pair<Eigen::Vector2d, Eigen::Vector2d> line_chord(
    const Eigen::VectorXd& abc, const Eigen::Vector2d& lo,
    const Eigen::Vector2d& hi) {
  const double a = abc[0], b = abc[1], c = abc[2];
  std::vector<Eigen::Vector2d> hits;
  auto add = [&](double x, double y) {
    if (x < lo[0] - 1e-9 || x > hi[0] + 1e-9 || y < lo[1] - 1e-9 ||
        y > hi[1] + 1e-9)
      return;
    for (const auto& h : hits)
      if ((h - Eigen::Vector2d(x, y)).norm() < 1e-9) return;
    hits.emplace_back(x, y);
  };
  if (std::abs(b) > 1e-15) {
    add(lo[0], -(a * lo[0] + c) / b);
    add(hi[0], -(a * hi[0] + c) / b);
  }
  if (std::abs(a) > 1e-15) {
    add(-(b * lo[1] + c) / a, lo[1]);
    add(-(b * hi[1] + c) / a, hi[1]);
  }
  if (hits.size() < 2)
    throw InvalidSpec("line structure does not intersect the bounds");
  size_t bi = 0, bj = 1;
  double best = -1;
  for (size_t i = 0; i < hits.size(); ++i)
    for (size_t j = i + 1; j < hits.size(); ++j) {
      const double d = (hits[i] - hits[j]).norm();
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  return {hits[bi], hits[bj]};
}

inline void validate_spec(const GeneratorSpec& spec) {
  const int dim = point_kind(spec.kind) == PointKind::Point2D ? 2 : 4;
  if (spec.bounds_min.size() != dim || spec.bounds_max.size() != dim)
    throw InvalidSpec("bounds dimension does not match model kind");
  for (int i = 0; i < dim; ++i)
    if (!(spec.bounds_min[i] < spec.bounds_max[i]))
      throw InvalidSpec("empty bounds");
  if (spec.inliers_per_structure < 1) throw InvalidSpec("need inliers >= 1");
  if (spec.inlier_noise < 0) throw InvalidSpec("negative noise");
  if (spec.structures.empty()) throw InvalidSpec("no structures");
  for (const auto& s : spec.structures)
    if (s.size() != param_dim(spec.kind))
      throw InvalidSpec("structure parameter length mismatch");
}

}  // namespace detail

/// Deterministic synthetic dataset from a generator spec. Inliers are drawn
/// uniformly along each structure and perturbed by Gaussian noise
/// (perpendicular for lines, radial for circles, on the second image for
/// correspondences); outliers are uniform in the bounds. Ground-truth labels
/// are 1..K in structure order, 0 for outliers.
inline Dataset generate(const GeneratorSpec& spec) {
  detail::validate_spec(spec);
  Rng rng(spec.seed);
  Dataset ds;
  ds.kind = spec.kind;
  ds.structure_count = static_cast<int>(spec.structures.size());
  std::vector<int> labels;

  const Eigen::VectorXd& lo = spec.bounds_min;
  const Eigen::VectorXd& hi = spec.bounds_max;
  int next_id = 0;
  auto push = [&](DataPoint p, int label) {
    p.id = next_id++;
    ds.points.push_back(std::move(p));
    labels.push_back(label);
  };

  for (size_t si = 0; si < spec.structures.size(); ++si) {
    const Eigen::VectorXd& params = spec.structures[si];
    const int label = static_cast<int>(si) + 1;
    switch (spec.kind) {
      case ModelType::Line: {
        const auto [p0, p1] =
            detail::line_chord(params, lo.head<2>(), hi.head<2>());
        const Eigen::Vector2d dir = p1 - p0;
        const Eigen::Vector2d normal(params[0], params[1]);
        for (int i = 0; i < spec.inliers_per_structure; ++i) {
          const double t = rng.uniform01();
          const double off = rng.gaussian(0.0, spec.inlier_noise);
          const Eigen::Vector2d p = p0 + t * dir + off * normal;
          push(DataPoint::point2d(p[0], p[1]), label);
        }
        break;
      }
      case ModelType::Circle: {
        for (int i = 0; i < spec.inliers_per_structure; ++i) {
          const double theta = rng.uniform(0.0, 2.0 * M_PI);
          const double r = params[2] + rng.gaussian(0.0, spec.inlier_noise);
          push(DataPoint::point2d(params[0] + r * std::cos(theta),
                                  params[1] + r * std::sin(theta)),
               label);
        }
        break;
      }
      case ModelType::Homography: {
        const Eigen::Matrix3d h = detail::as_matrix(params);
        for (int i = 0; i < spec.inliers_per_structure; ++i) {
          const double x = rng.uniform(lo[0], hi[0]);
          const double y = rng.uniform(lo[1], hi[1]);
          const Eigen::Vector3d q = h * Eigen::Vector3d(x, y, 1.0);
          const double u = q[0] / q[2] + rng.gaussian(0.0, spec.inlier_noise);
          const double v = q[1] / q[2] + rng.gaussian(0.0, spec.inlier_noise);
          push(DataPoint::correspondence(x, y, u, v), label);
        }
        break;
      }
      case ModelType::FundamentalMatrix: {
        const Eigen::Matrix3d f = detail::as_matrix(params);
        for (int i = 0; i < spec.inliers_per_structure; ++i) {
          bool placed = false;
          for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            const double x = rng.uniform(lo[0], hi[0]);
            const double y = rng.uniform(lo[1], hi[1]);
            const Eigen::Vector3d l = f * Eigen::Vector3d(x, y, 1.0);
            // Chord of the epipolar line within the second-image box.
            try {
              Eigen::VectorXd abc(3);
              abc << l[0], l[1], l[2];
              const auto [q0, q1] =
                  detail::line_chord(abc, lo.segment<2>(2), hi.segment<2>(2));
              const double t = rng.uniform01();
              const Eigen::Vector2d q = q0 + t * (q1 - q0);
              const double u = q[0] + rng.gaussian(0.0, spec.inlier_noise);
              const double v = q[1] + rng.gaussian(0.0, spec.inlier_noise);
              push(DataPoint::correspondence(x, y, u, v), label);
              placed = true;
            } catch (const InvalidSpec&) {
              // epipolar line missed the box; redraw x
            }
          }
          if (!placed)
            throw InvalidSpec("epipolar geometry never intersects bounds");
        }
        break;
      }
    }
  }

  const int dim = point_kind(spec.kind) == PointKind::Point2D ? 2 : 4;
  for (int i = 0; i < spec.outlier_count; ++i) {
    Eigen::VectorXd c(dim);
    for (int d = 0; d < dim; ++d) c[d] = rng.uniform(lo[d], hi[d]);
    DataPoint p;
    p.kind = point_kind(spec.kind);
    p.coords = c;
    push(std::move(p), 0);
  }

  ds.ground_truth = std::move(labels);
  ds.meta["generator"] = "mt19937_64";
  ds.meta["seed"] = std::to_string(spec.seed);
  ds.meta["model"] = model_name(spec.kind);
  ds.meta["structures"] = std::to_string(spec.structures.size());
  ds.meta["inliers_per_structure"] = std::to_string(spec.inliers_per_structure);
  ds.meta["inlier_noise"] = std::to_string(spec.inlier_noise);
  ds.meta["outliers"] = std::to_string(spec.outlier_count);
  return ds;
}

// ---------------------------------------------------------------------------
// Segmentation error
// ---------------------------------------------------------------------------

namespace detail {

/// Hungarian algorithm (potentials form), minimizing total cost over a
/// square matrix. Returns the column matched to each row.
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0), v(static_cast<size_t>(n) + 1, 0);
  std::vector<int> match(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = match[static_cast<size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                           u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<size_t>(j)] > 0)
      row_to_col[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Percentage of mislabeled points under the best one-to-one mapping between
/// predicted and ground-truth structure labels (outlier label 0 maps only to
/// itself). Invariant to permuting predicted structure labels.
inline double segmentation_error(const std::vector<int>& predicted,
                                 const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw LengthMismatch("label vectors differ in length");
  const size_t n = predicted.size();
  if (n == 0) return 0.0;
  int kp = 0, kt = 0;
  for (int l : predicted) kp = std::max(kp, l);
  for (int l : truth) kt = std::max(kt, l);
  const int dim = std::max(kp, kt);
  size_t correct = 0;
  for (size_t i = 0; i < n; ++i) correct += predicted[i] == 0 && truth[i] == 0;
  if (dim > 0) {
    std::vector<std::vector<double>> cost(
        static_cast<size_t>(dim), std::vector<double>(static_cast<size_t>(dim), 0));
    for (size_t i = 0; i < n; ++i)
      if (predicted[i] > 0 && truth[i] > 0)
        cost[static_cast<size_t>(predicted[i] - 1)]
            [static_cast<size_t>(truth[i] - 1)] -= 1.0;
    const std::vector<int> assign = detail::hungarian(cost);
    for (int p = 0; p < dim; ++p)
      correct += static_cast<size_t>(-cost[static_cast<size_t>(p)]
                                          [static_cast<size_t>(assign[static_cast<size_t>(p)])]);
  }
  return 100.0 * static_cast<double>(n - correct) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

enum class FileFormat { PointsCsv, CorrespondencesCsv, Json };

namespace detail {

inline std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  }
  return out;
}

}  // namespace detail

/// Load a dataset. CSV needs a header row (x,y[,label] or
/// x1,y1,x2,y2[,label]); '#' lines are comments. JSON is the format written
/// by save_dataset. The model kind of CSV files defaults per format and can
/// be overridden.
inline Dataset load_dataset(const std::string& path, FileFormat format,
                            std::optional<ModelType> model = std::nullopt);

/// Write a dataset bit-stably (fixed 9-decimal numbers).
inline void save_dataset(const Dataset& ds, const std::string& path,
                         FileFormat format);

namespace detail {

inline Dataset load_csv(const std::string& path, bool correspondences,
                        std::optional<ModelType> model) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  Dataset ds;
  ds.kind = model.value_or(correspondences ? ModelType::Homography
                                           : ModelType::Line);
  const size_t coord_cols = correspondences ? 4 : 2;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  bool has_label = false;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < coord_cols)
        throw SchemaError(path + ": header needs " + std::to_string(coord_cols) +
                          " coordinate columns");
      has_label = cells.size() > coord_cols && cells[coord_cols] == "label";
      have_header = true;
      continue;
    }
    if (cells.size() < coord_cols + (has_label ? 1 : 0))
      throw ParseError(path + ":" + std::to_string(line_no) + ": too few columns");
    Eigen::VectorXd c(static_cast<Eigen::Index>(coord_cols));
    for (size_t i = 0; i < coord_cols; ++i) {
      try {
        c[static_cast<Eigen::Index>(i)] = std::stod(cells[i]);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" +
                         cells[i] + "'");
      }
      if (!std::isfinite(c[static_cast<Eigen::Index>(i)]))
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite value");
    }
    DataPoint p;
    p.kind = correspondences ? PointKind::Correspondence : PointKind::Point2D;
    p.coords = std::move(c);
    p.id = static_cast<int>(ds.points.size());
    ds.points.push_back(std::move(p));
    if (has_label) {
      try {
        labels.push_back(std::stoi(cells[coord_cols]));
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad label");
      }
    }
  }
  if (!have_header) throw SchemaError(path + ": missing header row");
  if (has_label) {
    ds.ground_truth = std::move(labels);
    int mx = 0;
    for (int l : *ds.ground_truth) mx = std::max(mx, l);
    ds.structure_count = mx;
  }
  ds.meta["source"] = path;
  return ds;
}

}  // namespace detail

namespace detail {

inline ModelType model_from_name(const std::string& name) {
  if (name == "line") return ModelType::Line;
  if (name == "circle") return ModelType::Circle;
  if (name == "homography") return ModelType::Homography;
  if (name == "fundamental") return ModelType::FundamentalMatrix;
  throw SchemaError("unknown model kind '" + name + "'");
}

}  // namespace detail

inline Dataset load_dataset(const std::string& path, FileFormat format,
                            std::optional<ModelType> model) {
  if (format == FileFormat::PointsCsv)
    return detail::load_csv(path, false, model);
  if (format == FileFormat::CorrespondencesCsv)
    return detail::load_csv(path, true, model);

  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.contains("kind") || !j.contains("points"))
    throw SchemaError(path + ": missing 'kind' or 'points'");
  Dataset ds;
  ds.kind = model.value_or(detail::model_from_name(j["kind"].get<std::string>()));
  const PointKind pk = point_kind(ds.kind);
  const int dim = pk == PointKind::Point2D ? 2 : 4;
  for (const auto& row : j["points"]) {
    if (static_cast<int>(row.size()) != dim)
      throw SchemaError(path + ": point arity does not match kind");
    Eigen::VectorXd c(dim);
    for (int d = 0; d < dim; ++d) c[d] = row[static_cast<size_t>(d)].get<double>();
    DataPoint p;
    p.kind = pk;
    p.coords = std::move(c);
    p.id = static_cast<int>(ds.points.size());
    ds.points.push_back(std::move(p));
  }
  if (j.contains("labels")) {
    std::vector<int> labels = j["labels"].get<std::vector<int>>();
    if (labels.size() != ds.points.size())
      throw SchemaError(path + ": labels length mismatch");
    ds.ground_truth = std::move(labels);
  }
  if (j.contains("structure_count"))
    ds.structure_count = j["structure_count"].get<int>();
  else if (ds.ground_truth.has_value())
    for (int l : *ds.ground_truth)
      ds.structure_count = std::max(ds.structure_count, l);
  if (j.contains("meta"))
    for (const auto& [key, value] : j["meta"].items())
      ds.meta[key] = value.get<std::string>();
  return ds;
}

inline void save_dataset(const Dataset& ds, const std::string& path,
                         FileFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  const bool corr = !ds.points.empty() &&
                    ds.points.front().kind == PointKind::Correspondence;
  if (format == FileFormat::PointsCsv || format == FileFormat::CorrespondencesCsv) {
    if ((format == FileFormat::CorrespondencesCsv) != corr)
      throw Error("dataset kind does not match requested CSV format");
    out << (corr ? "x1,y1,x2,y2" : "x,y");
    if (ds.ground_truth.has_value()) out << ",label";
    out << "\n";
    for (size_t i = 0; i < ds.points.size(); ++i) {
      const auto& c = ds.points[i].coords;
      for (Eigen::Index d = 0; d < c.size(); ++d) {
        if (d) out << ",";
        out << detail::fmt9(c[d]);
      }
      if (ds.ground_truth.has_value())
        out << "," << (*ds.ground_truth)[i];
      out << "\n";
    }
    return;
  }
  // JSON, emitted by hand for fixed-precision stability.
  out << "{\n  \"kind\": \"" << model_name(ds.kind) << "\",\n";
  out << "  \"structure_count\": " << ds.structure_count << ",\n";
  out << "  \"points\": [";
  for (size_t i = 0; i < ds.points.size(); ++i) {
    out << (i ? ", [" : "[");
    const auto& c = ds.points[i].coords;
    for (Eigen::Index d = 0; d < c.size(); ++d)
      out << (d ? ", " : "") << detail::fmt9(c[d]);
    out << "]";
  }
  out << "],\n";
  if (ds.ground_truth.has_value()) {
    out << "  \"labels\": [";
    for (size_t i = 0; i < ds.ground_truth->size(); ++i)
      out << (i ? ", " : "") << (*ds.ground_truth)[i];
    out << "],\n";
  }
  out << "  \"meta\": {";
  bool first = true;
  for (const auto& [key, value] : ds.meta) {
    out << (first ? "" : ", ") << "\"" << detail::json_escape(key) << "\": \""
        << detail::json_escape(value) << "\"";
    first = false;
  }
  out << "}\n}\n";
}

}  // namespace lsc
