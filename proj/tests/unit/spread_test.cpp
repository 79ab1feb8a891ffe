#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "attnspread/spread.hpp"
#include "attnspread/synth.hpp"

namespace attnspread {
namespace {

AttentionMap single_cell(const GridSpec& g, int p, int q, double w = 0.7) {
  std::vector<double> weights(g.cell_count(), 0.0);
  weights[static_cast<std::size_t>(p) * g.size_cells + q] = w;
  return AttentionMap(g, weights);
}

void expect_rel(double actual, double expected, double rel = 1e-6, double abs_floor = 1e-9) {
  EXPECT_LE(std::abs(actual - expected), std::max(abs_floor, rel * std::abs(expected)))
      << actual << " vs " << expected;
}

TEST(AttentionMap, RejectsShapeAndValueErrors) {
  const GridSpec g{4, 0, 0, 1};
  EXPECT_THROW(AttentionMap(g, std::vector<double>(15, 1.0)), ParameterError);
  std::vector<double> w(16, 1.0);
  w[3] = -0.1;
  EXPECT_THROW(AttentionMap(g, w), ParameterError);
  w[3] = std::nan("");
  EXPECT_THROW(AttentionMap(g, w), ParameterError);
}

TEST(TopK, SingleNonzeroCell) {
  const auto map = single_cell(default_grid(), 10, 20, 0.25);
  const auto sel = select_top_k(map, 1);
  ASSERT_EQ(sel.entries.size(), 1u);
  EXPECT_EQ(sel.entries[0].p, 10);
  EXPECT_EQ(sel.entries[0].q, 20);
  EXPECT_EQ(sel.total_weight, 0.25);
}

TEST(TopK, UniformMapTakesRowMajorFirst) {
  const GridSpec g{8, 0, 0, 1};
  const AttentionMap map(g, std::vector<double>(64, 0.5));
  const auto sel = select_top_k(map, 4);
  ASSERT_EQ(sel.entries.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(sel.entries[static_cast<std::size_t>(i)].p, 0);
    EXPECT_EQ(sel.entries[static_cast<std::size_t>(i)].q, i);
  }
  EXPECT_EQ(sel.total_weight, 2.0);
}

TEST(TopK, MatchesFullSortOracle) {
  const GridSpec g{32, -12.8, -12.8, 0.8};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto map = synth::gen_random_map(g, seed);
    // Quantize to force many ties.
    std::vector<double> w = map.weights();
    for (double& v : w) v = std::floor(v * 50.0) / 50.0;
    const AttentionMap tied(g, w);
    std::vector<int> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
    const auto sel = select_top_k(tied, 100);
    ASSERT_EQ(sel.entries.size(), 100u);
    for (int i = 0; i < 100; ++i) {
      const auto& e = sel.entries[static_cast<std::size_t>(i)];
      ASSERT_EQ(e.p * 32 + e.q, idx[static_cast<std::size_t>(i)]) << "seed " << seed << " i " << i;
    }
  }
}

TEST(TopK, KOutOfRange) {
  const auto map = single_cell(GridSpec{4, 0, 0, 1}, 0, 0);
  EXPECT_THROW(select_top_k(map, 0), ParameterError);
  EXPECT_THROW(select_top_k(map, 17), ParameterError);
  EXPECT_NO_THROW(select_top_k(map, 16));
}

TEST(Mean, SingleCellAndMidpoint) {
  const GridSpec g = default_grid();
  const auto sel = select_top_k(single_cell(g, 64, 64), 1);
  const Vec2 m = attention_mean(sel, g);
  EXPECT_NEAR(m.x, 0.4, 1e-12);
  EXPECT_NEAR(m.y, 0.4, 1e-12);

  std::vector<double> w(g.cell_count(), 0.0);
  w[64 * 128 + 64] = 1.0;  // x = 0.4
  w[64 * 128 + 65] = 1.0;  // x = 1.2
  const auto pair = select_top_k(AttentionMap(g, w), 2);
  EXPECT_NEAR(attention_mean(pair, g).x, 0.8, 1e-12);
  const SymMat2 c = attention_covariance(pair, g, attention_mean(pair, g));
  EXPECT_NEAR(c.xx, 0.16, 1e-12);
  EXPECT_NEAR(c.xy, 0.0, 1e-12);
  EXPECT_NEAR(c.yy, 0.0, 1e-12);
}

TEST(Mean, AllZeroSelectionIsDegenerate) {
  const GridSpec g{4, 0, 0, 1};
  const AttentionMap zeros(g, std::vector<double>(16, 0.0));
  const auto sel = select_top_k(zeros, 3);
  EXPECT_THROW(attention_mean(sel, g), DegenerateAttentionError);
  EXPECT_THROW(attention_covariance(sel, g, {}), DegenerateAttentionError);
  EXPECT_THROW(analyze_map(zeros, 1), DegenerateAttentionError);
}

TEST(Spread, Determinant) {
  EXPECT_DOUBLE_EQ(attention_spread({4, 0, 1}), 4.0);
  EXPECT_DOUBLE_EQ(attention_spread({0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(attention_spread({1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(attention_spread({1, 1 + 1e-14, 1}), 0.0);  // roundoff clamp
  EXPECT_THROW(attention_spread({1, 2, 1}), InvalidCovarianceError);
}

TEST(Analyze, SingleCell) {
  const GridSpec g = default_grid();
  const auto s = analyze_map(single_cell(g, 5, 100), 10);
  const Vec2 c = cell_center(g, 5, 100);
  EXPECT_NEAR(s.mean.x, c.x, 1e-12);
  EXPECT_NEAR(s.mean.y, c.y, 1e-12);
  EXPECT_NEAR(s.covariance.xx, 0.0, 1e-20);
  EXPECT_NEAR(s.covariance.xy, 0.0, 1e-20);
  EXPECT_NEAR(s.covariance.yy, 0.0, 1e-20);
  EXPECT_NEAR(s.spread, 0.0, 1e-30);
  EXPECT_EQ(s.k_used, 10);
}

TEST(Analyze, UniformMapFullKMatchesDiscreteUniformMoments) {
  const GridSpec g{16, -6.4, -6.4, 0.8};
  const AttentionMap map(g, std::vector<double>(g.cell_count(), 1.0));
  const auto s = analyze_map(map, static_cast<int>(g.cell_count()));
  // Discrete uniform over n centers spaced h apart: variance h^2 (n^2 - 1) / 12.
  const double var = 0.8 * 0.8 * (16.0 * 16.0 - 1.0) / 12.0;
  expect_rel(s.mean.x, 0.0);
  expect_rel(s.mean.y, 0.0);
  expect_rel(s.covariance.xx, var);
  expect_rel(s.covariance.yy, var);
  expect_rel(s.covariance.xy, 0.0);
  expect_rel(s.spread, var * var);
}

TEST(Analyze, MatchesBruteForceOracle) {
  const GridSpec g{32, -12.8, -12.8, 0.8};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto map = synth::gen_random_map(g, seed);
    for (int k : {1, 10, 100, 1024}) {
      const auto s = analyze_map(map, k);
      const auto o = synth::brute_force_moments(map, k);
      expect_rel(s.mean.x, o.mean.x);
      expect_rel(s.mean.y, o.mean.y);
      expect_rel(s.covariance.xx, o.covariance.xx);
      expect_rel(s.covariance.xy, o.covariance.xy);
      expect_rel(s.covariance.yy, o.covariance.yy);
      expect_rel(s.spread, o.spread);
    }
  }
}

TEST(Analyze, WeightScalingInvariance) {
  const GridSpec g{32, -12.8, -12.8, 0.8};
  const auto base = synth::gen_random_map(g, 7);
  const auto ref = analyze_map(base, 100);
  for (double c : {1e-3, 1e3}) {
    std::vector<double> w = base.weights();
    for (double& v : w) v *= c;
    const auto s = analyze_map(AttentionMap(g, w), 100);
    expect_rel(s.mean.x, ref.mean.x, 1e-9, 0.0);
    expect_rel(s.covariance.xx, ref.covariance.xx, 1e-9, 0.0);
    expect_rel(s.spread, ref.spread, 1e-9, 0.0);
  }
}

TEST(Analyze, TranslationAndScaleCovariance) {
  const GridSpec g{32, -12.8, -12.8, 0.8};
  const GridSpec shifted{32, 40.0, -70.0, 0.8};
  const GridSpec scaled{32, -12.8 * 2.5, -12.8 * 2.5, 0.8 * 2.5};
  const auto base = synth::gen_random_map(g, 11);
  const auto a = analyze_map(base, 100);
  const auto b = analyze_map(AttentionMap(shifted, base.weights()), 100);
  const auto c = analyze_map(AttentionMap(scaled, base.weights()), 100);
  expect_rel(b.mean.x - a.mean.x, 40.0 + 12.8);
  expect_rel(b.mean.y - a.mean.y, -70.0 + 12.8);
  expect_rel(b.covariance.xx, a.covariance.xx);
  expect_rel(b.spread, a.spread);
  expect_rel(c.mean.x, 2.5 * a.mean.x);
  expect_rel(c.covariance.xy, 6.25 * a.covariance.xy);
  expect_rel(c.spread, std::pow(2.5, 4) * a.spread);
}

TEST(Analyze, CovariancePsdProperty) {
  const GridSpec g{24, 0, 0, 1.3};
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    const auto map = synth::gen_random_map(g, seed);
    for (int k : {1, 2, 3, 50, 576}) {
      const auto s = analyze_map(map, k);
      const auto e = eigen_sym2(s.covariance);
      EXPECT_GE(e.minor, -1e-9 * s.covariance.trace());
      EXPECT_GE(s.spread, 0.0);
    }
  }
}

TEST(Ellipse, ClosedFormCases) {
  auto e = covariance_ellipse({4, 0, 1}, 1.0);
  EXPECT_NEAR(e.semi_major, 2.0, 1e-12);
  EXPECT_NEAR(e.semi_minor, 1.0, 1e-12);
  EXPECT_NEAR(e.rotation, 0.0, 1e-12);

  e = covariance_ellipse({2.5, 1.5, 2.5}, 1.0);
  EXPECT_NEAR(e.semi_major, 2.0, 1e-12);
  EXPECT_NEAR(e.semi_minor, 1.0, 1e-12);
  EXPECT_NEAR(e.rotation, M_PI / 4, 1e-12);

  e = covariance_ellipse({0, 0, 0}, 2.0);
  EXPECT_EQ(e.semi_major, 0.0);
  EXPECT_EQ(e.semi_minor, 0.0);

  e = covariance_ellipse({1, 0, 9}, 2.0);
  EXPECT_NEAR(e.semi_major, 6.0, 1e-12);
  EXPECT_NEAR(e.semi_minor, 2.0, 1e-12);
  EXPECT_NEAR(e.rotation, M_PI / 2, 1e-12);
}

TEST(Ellipse, Errors) {
  EXPECT_THROW(covariance_ellipse({1, 2, 1}, 1.0), InvalidCovarianceError);
  EXPECT_THROW(covariance_ellipse({1, 0, 1}, 0.0), ParameterError);
}

TEST(Ellipse, RotationRangeProperty) {
  synth::Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(0, 5), c = rng.uniform(0, 5);
    const double b = rng.uniform(-1, 1) * std::sqrt(a * c);
    const auto e = covariance_ellipse({a, b, c}, 1.0);
    EXPECT_GT(e.rotation, -M_PI / 2);
    EXPECT_LE(e.rotation, M_PI / 2);
    EXPECT_GE(e.semi_major, e.semi_minor);
    // Major axis direction should be an eigenvector of the matrix.
    const double ux = std::cos(e.rotation), uy = std::sin(e.rotation);
    const double lam = e.semi_major * e.semi_major;
    EXPECT_NEAR(a * ux + b * uy, lam * ux, 1e-9);
    EXPECT_NEAR(b * ux + c * uy, lam * uy, 1e-9);
  }
}

}  // namespace
}  // namespace attnspread
