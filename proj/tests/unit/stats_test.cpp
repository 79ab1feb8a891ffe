#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "attnspread/stats.hpp"
#include "attnspread/synth.hpp"

namespace attnspread {
namespace {

// Sort-based reference: insertion sort plus the closest-ranks formula.
double reference_percentile(std::vector<double> v, double q) {
  for (std::size_t i = 1; i < v.size(); ++i)
    for (std::size_t j = i; j > 0 && v[j - 1] > v[j]; --j) std::swap(v[j - 1], v[j]);
  const double rank = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

AnalysisRecord record(double iou, std::vector<double> spreads, double cx = 0.0, double cy = 0.0) {
  AnalysisRecord r;
  r.detection_id = "d";
  r.score = 0.9;
  r.cls = "car";
  r.iou = iou;
  r.box = {cx, cy, 4, 2, 0};
  r.spread_per_layer = std::move(spreads);
  return r;
}

TEST(Percentile, ClosestRanksConvention) {
  const SampleSet s({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(percentile(s, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile(s, 25), 1.75);
  EXPECT_DOUBLE_EQ(percentile(s, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(s, 100), 4.0);
  for (double q : {0.0, 13.0, 50.0, 99.0}) EXPECT_DOUBLE_EQ(percentile(SampleSet({7}), q), 7.0);
  EXPECT_THROW(percentile(SampleSet(), 50), EmptyBinError);
  EXPECT_THROW(percentile(s, 101), ParameterError);
}

TEST(Percentile, MedianIsTextbookMedian) {
  synth::Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 50);
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::floor(rng.uniform(-100, 100)));
    SampleSet s(v);
    std::sort(v.begin(), v.end());
    const double textbook = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    EXPECT_DOUBLE_EQ(s.median(), textbook);
  }
}

TEST(Percentile, MatchesReferenceExactly) {
  synth::Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 300);
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.uniform(0, 500));
    const SampleSet s(v);
    for (double q : {25.0, 50.0, 75.0}) EXPECT_EQ(s.percentile(q), reference_percentile(v, q));
  }
}

TEST(SampleSet, MergeIsOrderIndependent) {
  SampleSet a({3, 1, 2}), b({9, 5});
  SampleSet ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.sorted(), ba.sorted());
  EXPECT_EQ(ab.mean(), ba.mean());
  EXPECT_THROW(a.add(std::nan("")), ParameterError);
}

TEST(Filter, StrictScoreAndClass) {
  std::vector<AnalysisRecord> rs(4, record(0.5, {1}));
  rs[0].score = 0.8;
  rs[1].score = 0.81;
  rs[2].cls = "pedestrian";
  rs[3].score = 0.95;
  const auto kept = filter_records(rs);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].score, 0.81);
  EXPECT_EQ(kept[1].score, 0.95);
  EXPECT_EQ(filter_records(rs, 0.8, std::nullopt).size(), 3u);
}

TEST(IouCurve, ExclusionAndSingleRecord) {
  const auto s = iou_curve({record(0.0, {99}), record(0.55, {42})});
  ASSERT_EQ(s.bins.size(), 10u);
  std::size_t total = 0;
  for (const auto& b : s.bins) total += b.count;
  EXPECT_EQ(total, 1u);
  const auto& b = s.bins[5];
  EXPECT_NEAR(b.center, 0.55, 1e-12);
  EXPECT_EQ(b.count, 1u);
  EXPECT_EQ(*b.median, 42.0);
  EXPECT_EQ(*b.p25, 42.0);
  EXPECT_EQ(*b.p75, 42.0);
  EXPECT_FALSE(s.bins[0].median.has_value());
}

TEST(IouCurve, BinEdges) {
  const auto s = iou_curve({record(0.3, {1}), record(1.0, {2}), record(0.1, {3}), record(0.0999, {4})});
  EXPECT_EQ(s.bins[3].count, 1u);  // 0.3 is the lower edge of [0.3, 0.4)
  EXPECT_EQ(s.bins[9].count, 1u);  // final bin is closed at 1
  EXPECT_EQ(s.bins[1].count, 1u);
  EXPECT_EQ(s.bins[0].count, 1u);
}

TEST(IouCurve, MediansMatchSortOracle) {
  synth::Rng rng(31);
  std::vector<AnalysisRecord> rs;
  std::vector<std::vector<double>> per_bin(10);
  for (int bin = 0; bin < 9; ++bin) {
    const int n = 3 + bin * 2;
    for (int i = 0; i < n; ++i) {
      const double iou = (bin + rng.uniform(0.05, 0.95)) * 0.1;
      const double spread = rng.uniform(1, 500);
      rs.push_back(record(iou, {spread * 2, spread}));
      per_bin[static_cast<std::size_t>(bin)].push_back(spread);
    }
  }
  const auto s = iou_curve(rs);
  for (std::size_t b = 0; b < 9; ++b) {
    ASSERT_EQ(s.bins[b].count, per_bin[b].size());
    EXPECT_EQ(*s.bins[b].median, reference_percentile(per_bin[b], 50));
    EXPECT_EQ(*s.bins[b].p25, reference_percentile(per_bin[b], 25));
    EXPECT_EQ(*s.bins[b].p75, reference_percentile(per_bin[b], 75));
  }
  EXPECT_EQ(s.bins[9].count, 0u);
  // Layer override selects the first layer.
  const auto first = iou_curve(rs, 0.1, 0);
  EXPECT_EQ(*first.bins[0].median, 2 * *s.bins[0].median);
  EXPECT_THROW(iou_curve(rs, 0.1, 5), ParameterError);
}

TEST(IouCurve, PermutationInvariantBitIdentical) {
  synth::Rng rng(2);
  std::vector<AnalysisRecord> rs;
  for (int i = 0; i < 400; ++i) rs.push_back(record(rng.uniform(0, 1), {rng.uniform(0, 1000)}));
  const auto a = iou_curve(rs);
  std::mt19937 shuffler(4);
  std::shuffle(rs.begin(), rs.end(), shuffler);
  const auto b = iou_curve(rs);
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    EXPECT_EQ(a.bins[i].mean, b.bins[i].mean);
    EXPECT_EQ(a.bins[i].median, b.bins[i].median);
    EXPECT_EQ(a.bins[i].p25, b.bins[i].p25);
  }
}

TEST(SpatialMap, BinningAndMeans) {
  const auto g = spatial_map({record(0.5, {10}, 0.1, 0.1), record(0.5, {30}, 0.2, 0.3),
                              record(0.5, {5}, 60, 0), record(0.5, {7}, -51.2, 51.19)});
  EXPECT_EQ(g.count[g.index(10, 10)], 2u);
  EXPECT_EQ(*g.mean_spread[g.index(10, 10)], 20.0);
  EXPECT_EQ(g.count[g.index(0, 19)], 1u);
  std::size_t total = 0;
  for (auto c : g.count) total += c;
  EXPECT_EQ(total, 3u);
  EXPECT_FALSE(g.mean_spread[g.index(0, 0)].has_value());
  EXPECT_NEAR(g.center(10), 2.56, 1e-12);
}

TEST(LayerCurve, PerLayerMedians) {
  std::vector<AnalysisRecord> rs(5, record(0.5, {1, 2, 3, 4, 5, 6}));
  const auto s = layer_curve(rs);
  ASSERT_EQ(s.bins.size(), 6u);
  for (int l = 0; l < 6; ++l) {
    EXPECT_EQ(s.bins[static_cast<std::size_t>(l)].center, l);
    EXPECT_EQ(*s.bins[static_cast<std::size_t>(l)].median, l + 1.0);
    EXPECT_EQ(s.bins[static_cast<std::size_t>(l)].count, 5u);
  }
  rs.push_back(record(0.5, {1, 2}));
  EXPECT_THROW(layer_curve(rs), FormatError);
  EXPECT_TRUE(layer_curve({}).bins.empty());
}

TEST(LayerCurve, RandomMatchesOracle) {
  synth::Rng rng(55);
  std::vector<AnalysisRecord> rs;
  std::vector<std::vector<double>> cols(6);
  for (int i = 0; i < 77; ++i) {
    std::vector<double> s;
    for (int l = 0; l < 6; ++l) {
      s.push_back(rng.uniform(0, 1000));
      cols[static_cast<std::size_t>(l)].push_back(s.back());
    }
    rs.push_back(record(0.5, s));
  }
  const auto s = layer_curve(rs);
  for (std::size_t l = 0; l < 6; ++l) EXPECT_EQ(*s.bins[l].median, reference_percentile(cols[l], 50));
}

AnalysisRecord track_obs(const std::string& track, double t_s, double spread) {
  AnalysisRecord r = record(0.5, {spread});
  r.track_id = track;
  r.timestamp_us = static_cast<std::int64_t>(std::llround(t_s * 1e6));
  return r;
}

TEST(TrackAge, ShortTrackExcluded) {
  std::vector<AnalysisRecord> rs;
  for (int i = 0; i <= 13; ++i) rs.push_back(track_obs("short", 0.5 * i + (i == 13 ? 0.4 : 0), 1));
  const auto c = track_age_curves(rs);  // lasts 6.9 s
  for (const auto& b : c.init.bins) EXPECT_EQ(b.count, 0u);
  for (const auto& b : c.final.bins) EXPECT_EQ(b.count, 0u);
}

TEST(TrackAge, EightSecondTrackAt2Hz) {
  std::vector<AnalysisRecord> rs;
  for (int i = 0; i <= 16; ++i) rs.push_back(track_obs("long", 0.5 * i, 100 + i));
  AnalysisRecord untracked = record(0.5, {1});
  rs.push_back(untracked);
  const auto c = track_age_curves(rs);
  ASSERT_EQ(c.init.bins.size(), 8u);
  ASSERT_EQ(c.final.bins.size(), 8u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_NEAR(c.init.bins[static_cast<std::size_t>(i)].center, 0.5 * i, 1e-12);
    EXPECT_EQ(c.init.bins[static_cast<std::size_t>(i)].count, 1u);
    EXPECT_EQ(*c.init.bins[static_cast<std::size_t>(i)].median, 100.0 + i);
    EXPECT_NEAR(c.final.bins[static_cast<std::size_t>(i)].center, -3.5 + 0.5 * i, 1e-12);
    EXPECT_EQ(*c.final.bins[static_cast<std::size_t>(i)].median, 109.0 + i);
  }
  EXPECT_FALSE(std::signbit(c.final.bins.back().center));
}

TEST(TrackAge, TwoTrackEnumeration) {
  // Track a: 0..8 s every 0.5 s, missing t = 1.0.  Track b: 10..17.5 s.
  std::vector<AnalysisRecord> rs;
  for (int i = 0; i <= 16; ++i)
    if (i != 2) rs.push_back(track_obs("a", 0.5 * i, 1));
  for (int i = 0; i <= 15; ++i) rs.push_back(track_obs("b", 10 + 0.5 * i, 2));
  const auto c = track_age_curves(rs);
  const std::vector<std::size_t> init{2, 2, 1, 2, 2, 2, 2, 2};
  const std::vector<std::size_t> fin{2, 2, 2, 2, 2, 2, 2, 2};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(c.init.bins[i].count, init[i]) << i;
    EXPECT_EQ(c.final.bins[i].count, fin[i]) << i;
  }
}

}  // namespace
}  // namespace attnspread
