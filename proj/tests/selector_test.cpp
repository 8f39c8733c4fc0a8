#include "lsc/selector.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lsc/dataset.hpp"
#include "lsc/preference.hpp"
#include "lsc/presets.hpp"
#include "lsc/sampler.hpp"
#include "oracles.hpp"

using lsc::DataPoint;
using lsc::Hypothesis;
using lsc::ModelType;
using lsc::OriginLine;

namespace {

OriginLine line2(double x, double y) {
  OriginLine l;
  l.direction = Eigen::Vector2d(x, y).normalized();
  return l;
}

Eigen::VectorXd vec2(double x, double y) { return Eigen::Vector2d(x, y); }

}  // namespace

TEST(OriginLineSampleCount, ReferenceValues) {
  EXPECT_EQ(lsc::origin_line_sample_count(0.99, 0.5, 1), 7);
  EXPECT_EQ(lsc::origin_line_sample_count(0.99, 0.0, 1), 1);
  EXPECT_EQ(lsc::origin_line_sample_count(0.999, 0.5, 1), 10);
}

TEST(OriginLineResidual, FortyFiveDegreeGeometry) {
  EXPECT_NEAR(lsc::origin_line_residual(line2(1, 1), vec2(1, 0)),
              1.0 / std::sqrt(2.0), 1e-12);
}

TEST(OriginLineResidual, CollinearPointsAreOnTheLine) {
  const OriginLine l = line2(0.3, -0.8);
  for (double c : {2.0, -5.0, 0.1, -0.001})
    EXPECT_NEAR(lsc::origin_line_residual(l, c * l.direction), 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(lsc::origin_line_residual(l, vec2(0, 0)), 0.0);
}

TEST(OriginLineResidual, HomogeneousInPointScale) {
  lsc::Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const OriginLine l = line2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::VectorXd p = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const double c = rng.uniform(-4, 4);
    EXPECT_NEAR(lsc::origin_line_residual(l, c * p),
                std::abs(c) * lsc::origin_line_residual(l, p), 1e-10);
  }
}

TEST(OriginLineResidual, DimensionMismatch) {
  OriginLine l;
  l.direction = Eigen::Vector3d(1, 0, 0);
  EXPECT_THROW(lsc::origin_line_residual(l, vec2(1, 1)), lsc::DimensionMismatch);
}

TEST(SolveCover, TwoDisjointClusters) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(vec2(1.0 + 0.05 * i, 0.02 * i));
  for (int i = 0; i < 5; ++i) pts.push_back(vec2(0.02 * i, 1.0 + 0.05 * i));
  const std::vector<OriginLine> lines = {line2(1, 0.05), line2(0.05, 1)};
  const auto [selected, labels] = lsc::solve_cover(pts, lines, 0.3, 2);
  EXPECT_EQ(selected, (std::vector<int>{0, 1}));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(labels[static_cast<size_t>(i)], 1);
  for (int i = 6; i < 11; ++i) EXPECT_EQ(labels[static_cast<size_t>(i)], 2);
}

TEST(SolveCover, SingleSlotPicksLargestSet) {
  // Line 1's members are a superset of line 0's.
  std::vector<Eigen::VectorXd> pts = {vec2(1, 0), vec2(1, 0.1), vec2(1, 0.6)};
  const std::vector<OriginLine> lines = {line2(1, 0), line2(1, 0.25)};
  const auto [selected, labels] = lsc::solve_cover(pts, lines, 0.45, 1);
  EXPECT_EQ(selected, (std::vector<int>{1}));
}

TEST(SolveCover, TiesPreferLexicographicallySmallestSubset) {
  // Both lines cover the same single point; {0} must win over {1} and {0,1}.
  std::vector<Eigen::VectorXd> pts = {vec2(1, 0)};
  const std::vector<OriginLine> lines = {line2(1, 0.1), line2(1, -0.1)};
  const auto [selected, labels] = lsc::solve_cover(pts, lines, 0.5, 2);
  EXPECT_EQ(selected, (std::vector<int>{0}));
}

TEST(SolveCover, EmptyLinesCoverNothing) {
  std::vector<Eigen::VectorXd> pts = {vec2(1, 0), vec2(0, 1)};
  const auto [selected, labels] = lsc::solve_cover(pts, {}, 0.5, 3);
  EXPECT_TRUE(selected.empty());
  EXPECT_EQ(labels, (std::vector<int>{0, 0}));
}

TEST(SolveCover, MatchesBruteForceOracleOnRandomInstances) {
  std::mt19937_64 engine(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> nl(3, 7);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 12, m = nl(engine), k = 3;
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back(vec2(u(engine) * 2, u(engine) * 2));
    std::vector<OriginLine> lines;
    for (int j = 0; j < m; ++j) lines.push_back(line2(u(engine), u(engine)));
    const double beta = 0.4;
    const auto [selected, labels] = lsc::solve_cover(pts, lines, beta, k);
    long long covered = 0;
    for (int l : labels) covered += l != 0;

    std::vector<std::vector<bool>> member(
        static_cast<size_t>(m), std::vector<bool>(static_cast<size_t>(n)));
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i)
        member[static_cast<size_t>(j)][static_cast<size_t>(i)] =
            lsc::origin_line_residual(lines[static_cast<size_t>(j)],
                                      pts[static_cast<size_t>(i)]) <= beta;
    EXPECT_EQ(covered, oracle::brute_force_cover(member, k));
  }
}

TEST(Dbscan, TwoBlobsAndNoise) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(vec2(0.01 * i, 0));
  for (int i = 0; i < 5; ++i) pts.push_back(vec2(5 + 0.01 * i, 0));
  pts.push_back(vec2(100, 100));
  const auto labels = lsc::dbscan_labels(pts, 0.1, 3);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(labels[static_cast<size_t>(i)], 1);
  for (int i = 5; i < 10; ++i) EXPECT_EQ(labels[static_cast<size_t>(i)], 2);
  EXPECT_EQ(labels[10], 0);
}

namespace {

// A compact two-line scene pushed through the sampler so lsc_msa sees
// realistic inputs.
struct MsaFixture {
  std::vector<DataPoint> points;
  std::vector<int> truth;
  std::vector<Hypothesis> hypotheses;
  lsc::PreferenceMatrix pref;
  lsc::SelectorConfig config;
};

MsaFixture two_line_fixture(uint64_t seed) {
  lsc::GeneratorSpec spec;
  spec.kind = ModelType::Line;
  spec.structures = {lsc::detail::line_through(0, 0.25, 1, 0.35),
                     lsc::detail::line_through(0, 0.75, 1, 0.65)};
  spec.inliers_per_structure = 60;
  spec.inlier_noise = 0.003;
  spec.outlier_count = 60;
  spec.bounds_min = Eigen::Vector2d(0, 0);
  spec.bounds_max = Eigen::Vector2d(1, 1);
  spec.seed = seed;
  const lsc::Dataset ds = lsc::generate(spec);

  MsaFixture f;
  f.points = ds.points;
  f.truth = *ds.ground_truth;
  lsc::SamplerConfig scfg;
  scfg.psi = 0.01;
  scfg.k = 2;
  scfg.scale_quantile = 0.05;
  f.hypotheses = lsc::lsc_sa(f.points, ModelType::Line, scfg);
  f.pref = lsc::build_preference_matrix(f.points, f.hypotheses, scfg.psi);
  f.config.k = 2;
  f.config.beta = 0.8;
  return f;
}

}  // namespace

TEST(LscMsa, RecoversTwoLines) {
  MsaFixture f = two_line_fixture(23);
  const lsc::FitResult r = lsc::lsc_msa(f.hypotheses, f.pref, f.points, f.config);
  ASSERT_EQ(r.instances.size(), 2u);
  EXPECT_LE(lsc::segmentation_error(r.labels, f.truth), 5.0);
  EXPECT_LE(static_cast<int>(r.instances.size()), f.config.k);
  // Instance parameters must appear verbatim in the hypothesis list.
  for (const auto& inst : r.instances) {
    bool found = false;
    for (const auto& h : f.hypotheses)
      found = found || h.params == inst.params;
    EXPECT_TRUE(found);
  }
}

TEST(LscMsa, SingleStructurePicksMaxWeightHypothesis) {
  lsc::GeneratorSpec spec;
  spec.kind = ModelType::Line;
  spec.structures = {lsc::detail::line_through(0, 0.4, 1, 0.6)};
  spec.inliers_per_structure = 70;
  spec.inlier_noise = 0.002;
  spec.outlier_count = 0;
  spec.bounds_min = Eigen::Vector2d(0, 0);
  spec.bounds_max = Eigen::Vector2d(1, 1);
  spec.seed = 8;
  const lsc::Dataset ds = lsc::generate(spec);
  lsc::SamplerConfig scfg;
  scfg.psi = 0.01;
  scfg.k = 1;
  const auto hyps = lsc::lsc_sa(ds.points, ModelType::Line, scfg);
  const auto pref = lsc::build_preference_matrix(ds.points, hyps, scfg.psi);
  lsc::SelectorConfig cfg;
  cfg.k = 1;
  const lsc::FitResult r = lsc::lsc_msa(hyps, pref, ds.points, cfg);
  ASSERT_EQ(r.instances.size(), 1u);
  for (size_t i = 0; i < r.labels.size(); ++i) EXPECT_EQ(r.labels[i], 1);
  // No retained hypothesis outweighs the selected instance.
  for (const auto& h : hyps) EXPECT_LE(h.weight, r.instances[0].weight + 1e-15);
}

TEST(LscMsa, DuplicatedHypothesisListGivesSameResult) {
  MsaFixture f = two_line_fixture(31);
  const lsc::FitResult base = lsc::lsc_msa(f.hypotheses, f.pref, f.points, f.config);

  std::vector<Hypothesis> doubled;
  for (const auto& h : f.hypotheses) {
    doubled.push_back(h);
    doubled.push_back(h);
  }
  const auto pref2 = lsc::build_preference_matrix(f.points, doubled, f.pref.psi);
  const lsc::FitResult dup = lsc::lsc_msa(doubled, pref2, f.points, f.config);
  ASSERT_EQ(base.instances.size(), dup.instances.size());
  for (size_t i = 0; i < base.instances.size(); ++i)
    EXPECT_LE((base.instances[i].params - dup.instances[i].params).norm(), 1e-9);
  EXPECT_EQ(base.labels, dup.labels);
}

TEST(LscMsa, StableUnderHypothesisPermutation) {
  MsaFixture f = two_line_fixture(41);
  const lsc::FitResult base = lsc::lsc_msa(f.hypotheses, f.pref, f.points, f.config);

  std::vector<Hypothesis> reversed(f.hypotheses.rbegin(), f.hypotheses.rend());
  const auto pref2 = lsc::build_preference_matrix(f.points, reversed, f.pref.psi);
  const lsc::FitResult perm = lsc::lsc_msa(reversed, pref2, f.points, f.config);

  ASSERT_EQ(base.instances.size(), perm.instances.size());
  std::vector<std::vector<double>> a, b;
  for (const auto& h : base.instances)
    a.emplace_back(h.params.data(), h.params.data() + h.params.size());
  for (const auto& h : perm.instances)
    b.emplace_back(h.params.data(), h.params.data() + h.params.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t d = 0; d < a[i].size(); ++d) EXPECT_NEAR(a[i][d], b[i][d], 1e-9);
  EXPECT_EQ(base.labels, perm.labels);
}

TEST(LscMsa, CoverObjectiveMatchesDiagnostics) {
  MsaFixture f = two_line_fixture(51);
  const lsc::FitResult r = lsc::lsc_msa(f.hypotheses, f.pref, f.points, f.config);
  ASSERT_TRUE(r.diagnostics.count("cover_objective"));
  ASSERT_TRUE(r.diagnostics.count("hypotheses_retained"));
  EXPECT_GT(r.diagnostics.at("cover_objective"), 0.0);
  EXPECT_LE(r.diagnostics.at("cover_objective"),
            r.diagnostics.at("hypotheses_retained"));
}

TEST(LscMsa, DbscanSelectorAlsoRecoversStructures) {
  MsaFixture f = two_line_fixture(61);
  f.config.selector = lsc::SelectorKind::Dbscan;
  f.config.dbscan_eps = 0.8;
  f.config.dbscan_min_pts = 3;
  const lsc::FitResult r = lsc::lsc_msa(f.hypotheses, f.pref, f.points, f.config);
  EXPECT_LE(static_cast<int>(r.instances.size()), f.config.k);
  EXPECT_GE(r.instances.size(), 1u);
}
