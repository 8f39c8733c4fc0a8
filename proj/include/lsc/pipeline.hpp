#pragma once

/// End-to-end fitting: coordinate normalization, LSC-SA sampling, preference
/// matrix over the refined hypotheses, LSC-MSA selection, and denormalized
/// reporting.
///
/// Residual thresholds (psi, beta defaults) assume unit-scale data, so the
/// pipeline maps every dataset to [0,1] extent before fitting: one isotropic
/// transform for 2-D points, one per image side for correspondences. Labels
/// are scale-free; instance parameters are mapped back to input units for
/// the report.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsc/dataset.hpp"
#include "lsc/geometry.hpp"
#include "lsc/preference.hpp"
#include "lsc/sampler.hpp"
#include "lsc/selector.hpp"

namespace lsc {

struct FitOptions {
  std::optional<double> psi;   // default: 0.05 homography, 0.01 otherwise
  double beta = 0.8;
  int k = 1;
  SelectorKind selector = SelectorKind::Cover;
  LineSampling line_sampling = LineSampling::DiverseLargestDistance;
  int update_iterations = 10;
  int rank_window = 10;
  std::optional<double> scale_quantile;  // default: 0.1 / k
  double dbscan_eps = 0.8;
  int dbscan_min_pts = 3;
  double density_fraction = 1.0;
};

inline double default_psi(ModelType kind) {
  return kind == ModelType::Homography ? 0.05 : 0.01;
}

/// Isotropic [0,1]-extent mapping x -> (x - offset) / scale, one per
/// coordinate pair.
struct SideTransform {
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  double scale = 1.0;
};

struct Normalization {
  SideTransform first;
  SideTransform second;  // used by correspondences only
};

inline Normalization compute_normalization(const std::vector<DataPoint>& points) {
  Normalization norm;
  const int sides =
      points.front().kind == PointKind::Correspondence ? 2 : 1;
  for (int s = 0; s < sides; ++s) {
    Eigen::Vector2d lo(std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (const auto& p : points) {
      for (int d = 0; d < 2; ++d) {
        lo[d] = std::min(lo[d], p.coords[2 * s + d]);
        hi[d] = std::max(hi[d], p.coords[2 * s + d]);
      }
    }
    SideTransform t;
    t.offset = lo;
    t.scale = std::max((hi - lo).maxCoeff(), 1e-12);
    (s == 0 ? norm.first : norm.second) = t;
  }
  return norm;
}

inline std::vector<DataPoint> apply_normalization(
    const std::vector<DataPoint>& points, const Normalization& norm) {
  std::vector<DataPoint> out = points;
  for (auto& p : out) {
    p.coords[0] = (p.coords[0] - norm.first.offset[0]) / norm.first.scale;
    p.coords[1] = (p.coords[1] - norm.first.offset[1]) / norm.first.scale;
    if (p.kind == PointKind::Correspondence) {
      p.coords[2] = (p.coords[2] - norm.second.offset[0]) / norm.second.scale;
      p.coords[3] = (p.coords[3] - norm.second.offset[1]) / norm.second.scale;
    }
  }
  return out;
}

namespace detail {

inline Eigen::Matrix3d to_homogeneous(const SideTransform& t) {
  Eigen::Matrix3d m;
  m << 1.0 / t.scale, 0, -t.offset[0] / t.scale, 0, 1.0 / t.scale,
      -t.offset[1] / t.scale, 0, 0, 1;
  return m;
}

}  // namespace detail

/// Map a hypothesis fit in normalized coordinates back to input units.
inline Hypothesis denormalize_hypothesis(const Hypothesis& h,
                                         const Normalization& norm) {
  Hypothesis out = h;
  const double s = norm.first.scale;
  const Eigen::Vector2d off = norm.first.offset;
  switch (h.kind) {
    case ModelType::Line: {
      // a*(x-ox)/s + b*(y-oy)/s + c = 0  ->  a x + b y + (c s - a ox - b oy) = 0
      Eigen::VectorXd v(3);
      v[0] = h.params[0];
      v[1] = h.params[1];
      v[2] = h.params[2] * s - h.params[0] * off[0] - h.params[1] * off[1];
      detail::canonicalize_sign(v);
      out.params = std::move(v);
      out.scale = h.scale * s;
      break;
    }
    case ModelType::Circle: {
      Eigen::VectorXd v(3);
      v[0] = h.params[0] * s + off[0];
      v[1] = h.params[1] * s + off[1];
      v[2] = h.params[2] * s;
      out.params = std::move(v);
      out.scale = h.scale * s;
      break;
    }
    case ModelType::Homography: {
      const Eigen::Matrix3d t1 = detail::to_homogeneous(norm.first);
      const Eigen::Matrix3d t2 = detail::to_homogeneous(norm.second);
      Eigen::Matrix3d m = t2.inverse() * detail::as_matrix(h.params) * t1;
      m /= m.norm();
      Eigen::VectorXd v(9);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) v[3 * r + c] = m(r, c);
      detail::canonicalize_sign(v);
      out.params = std::move(v);
      out.scale = h.scale * norm.second.scale;
      break;
    }
    case ModelType::FundamentalMatrix: {
      const Eigen::Matrix3d t1 = detail::to_homogeneous(norm.first);
      const Eigen::Matrix3d t2 = detail::to_homogeneous(norm.second);
      Eigen::Matrix3d m = t2.transpose() * detail::as_matrix(h.params) * t1;
      m /= m.norm();
      Eigen::VectorXd v(9);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) v[3 * r + c] = m(r, c);
      detail::canonicalize_sign(v);
      out.params = std::move(v);
      out.scale = h.scale * norm.second.scale;
      break;
    }
  }
  return out;
}

struct PipelineResult {
  FitResult fit;                       // labels + normalized-space instances
  std::vector<Hypothesis> instances;   // denormalized for reporting
  std::optional<double> se;
  double ms_sampling = 0;
  double ms_svd = 0;
  double ms_selection = 0;
  SamplerStats sampler_stats;
  SamplerConfig sampler_config;
  SelectorConfig selector_config;
};

/// Run the full fitting pipeline on a dataset.
inline PipelineResult run_fit(const Dataset& ds, const FitOptions& opt) {
  using clock = std::chrono::steady_clock;
  if (ds.points.empty()) throw TooFewPoints("empty dataset");

  SamplerConfig scfg;
  scfg.psi = opt.psi.value_or(default_psi(ds.kind));
  scfg.k = opt.k;
  scfg.update_iterations = opt.update_iterations;
  scfg.rank_window = opt.rank_window;
  scfg.scale_quantile = opt.scale_quantile.value_or(0.1 / opt.k);
  scfg.density_fraction = opt.density_fraction;

  SelectorConfig mcfg;
  mcfg.beta = opt.beta;
  mcfg.k = opt.k;
  mcfg.selector = opt.selector;
  mcfg.line_sampling = opt.line_sampling;
  mcfg.dbscan_eps = opt.dbscan_eps;
  mcfg.dbscan_min_pts = opt.dbscan_min_pts;

  const Normalization norm = compute_normalization(ds.points);
  const std::vector<DataPoint> pts = apply_normalization(ds.points, norm);

  PipelineResult out;
  out.sampler_config = scfg;
  out.selector_config = mcfg;

  const auto t0 = clock::now();
  const std::vector<Hypothesis> hyps = lsc_sa(pts, ds.kind, scfg, &out.sampler_stats);
  const auto t1 = clock::now();
  const PreferenceMatrix pref = build_preference_matrix(pts, hyps, scfg.psi);
  const auto t2 = clock::now();
  out.fit = lsc_msa(hyps, pref, pts, mcfg);
  const auto t3 = clock::now();

  out.ms_sampling = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.ms_svd = std::chrono::duration<double, std::milli>(t2 - t1).count();
  out.ms_selection = std::chrono::duration<double, std::milli>(t3 - t2).count();

  out.instances.reserve(out.fit.instances.size());
  for (const auto& h : out.fit.instances)
    out.instances.push_back(denormalize_hypothesis(h, norm));
  if (ds.ground_truth.has_value())
    out.se = segmentation_error(out.fit.labels, *ds.ground_truth);
  return out;
}

/// JSON run report. Timing fields live under "timings_ms" and are excluded
/// from determinism comparisons.
inline nlohmann::ordered_json make_report(const Dataset& ds,
                                          const PipelineResult& res) {
  nlohmann::ordered_json j;
  j["dataset"] = {{"model", model_name(ds.kind)},
                  {"points", ds.points.size()},
                  {"structures", ds.structure_count}};
  for (const auto& [key, value] : ds.meta) j["dataset"]["meta"][key] = value;
  j["config"] = {
      {"psi", res.sampler_config.psi},
      {"k", res.sampler_config.k},
      {"beta", res.selector_config.beta},
      {"selector",
       res.selector_config.selector == SelectorKind::Cover ? "cover" : "dbscan"},
      {"update_iterations", res.sampler_config.update_iterations},
      {"rank_window", res.sampler_config.rank_window},
      {"scale_quantile", res.sampler_config.scale_quantile},
      {"density_fraction", res.sampler_config.density_fraction}};
  nlohmann::ordered_json instances = nlohmann::ordered_json::array();
  for (const auto& h : res.instances) {
    nlohmann::ordered_json inst;
    inst["model"] = model_name(h.kind);
    inst["params"] = std::vector<double>(h.params.data(),
                                         h.params.data() + h.params.size());
    inst["scale"] = h.scale;
    inst["weight"] = h.weight;
    instances.push_back(std::move(inst));
  }
  j["result"]["instances"] = std::move(instances);
  j["result"]["labels"] = res.fit.labels;
  for (const auto& [key, value] : res.fit.diagnostics)
    j["result"]["diagnostics"][key] = value;
  j["result"]["diagnostics"]["initial_hypotheses"] =
      res.sampler_stats.initial_hypotheses;
  j["result"]["diagnostics"]["retained_points"] = res.sampler_stats.retained_points;
  if (res.se.has_value()) j["se"] = *res.se;
  j["timings_ms"] = {{"sampling", res.ms_sampling},
                     {"svd", res.ms_svd},
                     {"selection", res.ms_selection}};
  return j;
}

/// The same report with volatile fields removed; two runs on identical
/// inputs must serialize this identically.
inline nlohmann::ordered_json stable_report(nlohmann::ordered_json report) {
  report.erase("timings_ms");
  return report;
}

}  // namespace lsc
