#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attnspread/error.hpp"
#include "attnspread/geometry.hpp"

namespace attnspread {

/// Percentile by linear interpolation between closest ranks:
/// rank = q/100 * (n-1) over the ascending values.
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw EmptyBinError("percentile of an empty sample set");
  if (!(q >= 0.0 && q <= 100.0)) throw ParameterError("percentile: q outside [0, 100]");
  const double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Multiset of finite reals.  Merge is associative and commutative; every
/// summary sorts first, so results do not depend on insertion order.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::vector<double> values) {
    for (double v : values) add(v);
  }

  void add(double v) {
    if (!std::isfinite(v)) throw ParameterError("sample set: non-finite value");
    values_.push_back(v);
    sorted_ = false;
  }
  void merge(const SampleSet& other) {
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    sorted_ = false;
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  const std::vector<double>& sorted() const {
    if (!sorted_) {
      std::sort(values_.begin(), values_.end());
      sorted_ = true;
    }
    return values_;
  }

  double percentile(double q) const { return percentile_sorted(sorted(), q); }
  double median() const { return percentile(50.0); }
  double mean() const {
    if (empty()) throw EmptyBinError("mean of an empty sample set");
    double sum = 0.0;
    for (double v : sorted()) sum += v;
    return sum / static_cast<double>(values_.size());
  }

 private:
  mutable std::vector<double> values_;
  mutable bool sorted_ = true;
};

inline double percentile(const SampleSet& samples, double q) { return samples.percentile(q); }

/// One bin of a binned series.  Summary fields are empty when count == 0.
struct BinSummary {
  double center = 0.0;
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> median;
  std::optional<double> p25;
  std::optional<double> p75;
};

struct BinnedSeries {
  std::vector<BinSummary> bins;

  std::vector<double> medians() const {
    std::vector<double> out;
    for (const auto& b : bins)
      if (b.median) out.push_back(*b.median);
    return out;
  }
};

inline BinSummary summarize(double center, const SampleSet& s) {
  BinSummary b;
  b.center = center;
  b.count = s.size();
  if (!s.empty()) {
    b.mean = s.mean();
    b.median = s.percentile(50.0);
    b.p25 = s.percentile(25.0);
    b.p75 = s.percentile(75.0);
  }
  return b;
}

struct SpatialGridStats {
  int bins_per_side = 20;
  double extent = 51.2;
  /// Row-major by bin_y then bin_x.
  std::vector<std::optional<double>> mean_spread;
  std::vector<std::size_t> count;

  double bin_width() const { return 2.0 * extent / bins_per_side; }
  std::size_t index(int bin_x, int bin_y) const {
    return static_cast<std::size_t>(bin_y) * bins_per_side + bin_x;
  }
  double center(int bin) const { return -extent + (bin + 0.5) * bin_width(); }
};

/// One analyzed detection: the per-layer attention spread joined with its
/// detection metadata and matched IoU.
struct AnalysisRecord {
  std::string frame_id;
  std::string detection_id;
  std::optional<std::string> track_id;
  double score = 0.0;
  std::string cls;
  BevBox box;
  double iou = 0.0;
  std::vector<double> spread_per_layer;
  std::int64_t timestamp_us = 0;
};

inline std::vector<AnalysisRecord> filter_records(
    const std::vector<AnalysisRecord>& records, double score_threshold = 0.8,
    const std::optional<std::string>& class_filter = std::string("car")) {
  std::vector<AnalysisRecord> out;
  for (const auto& r : records)
    if (r.score > score_threshold && (!class_filter || r.cls == *class_filter)) out.push_back(r);
  return out;
}

namespace detail {

inline double layer_value(const AnalysisRecord& r, std::optional<int> layer) {
  if (r.spread_per_layer.empty())
    throw FormatError(r.detection_id, -1, "record has no per-layer spread");
  const int l = layer.value_or(static_cast<int>(r.spread_per_layer.size()) - 1);
  if (l < 0 || l >= static_cast<int>(r.spread_per_layer.size()))
    throw ParameterError("layer " + std::to_string(l) + " not present in record " +
                         r.detection_id);
  return r.spread_per_layer[static_cast<std::size_t>(l)];
}

// Number of bins of width `w` covering [0, span]; tolerant of 1/0.1 style roundoff.
inline int bin_count(double span, double w) {
  return std::max(1, static_cast<int>(std::ceil(span / w - 1e-9)));
}

}  // namespace detail

/// Spread versus IoU.  Bins are [i*w, (i+1)*w) with the last closed at 1;
/// records without overlap (iou <= 0) are dropped.
inline BinnedSeries iou_curve(const std::vector<AnalysisRecord>& records, double bin_width = 0.1,
                              std::optional<int> layer = std::nullopt) {
  if (!(bin_width > 0.0 && bin_width <= 1.0))
    throw ParameterError("iou curve: bin width must be in (0, 1]");
  const int n = detail::bin_count(1.0, bin_width);
  std::vector<SampleSet> bins(static_cast<std::size_t>(n));
  for (const auto& r : records) {
    if (!(r.iou > 0.0)) continue;
    int i = static_cast<int>(std::floor(r.iou / bin_width + 1e-9));
    i = std::clamp(i, 0, n - 1);
    bins[static_cast<std::size_t>(i)].add(detail::layer_value(r, layer));
  }
  BinnedSeries out;
  for (int i = 0; i < n; ++i)
    out.bins.push_back(summarize((i + 0.5) * bin_width, bins[static_cast<std::size_t>(i)]));
  return out;
}

/// Mean spread over a square grid of bins centered on the ego vehicle,
/// keyed by box center.  Records outside +-extent are dropped.
inline SpatialGridStats spatial_map(const std::vector<AnalysisRecord>& records,
                                    int bins_per_side = 20, double extent = 51.2,
                                    std::optional<int> layer = std::nullopt) {
  if (bins_per_side < 1) throw ParameterError("spatial map: bins_per_side must be >= 1");
  if (!(extent > 0.0)) throw ParameterError("spatial map: extent must be positive");
  SpatialGridStats g;
  g.bins_per_side = bins_per_side;
  g.extent = extent;
  const std::size_t cells = static_cast<std::size_t>(bins_per_side) * bins_per_side;
  std::vector<SampleSet> bins(cells);
  const double w = g.bin_width();
  for (const auto& r : records) {
    const double fx = std::floor((r.box.cx + extent) / w);
    const double fy = std::floor((r.box.cy + extent) / w);
    if (!(fx >= 0 && fy >= 0 && fx < bins_per_side && fy < bins_per_side)) continue;
    bins[g.index(static_cast<int>(fx), static_cast<int>(fy))].add(detail::layer_value(r, layer));
  }
  g.mean_spread.resize(cells);
  g.count.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    g.count[i] = bins[i].size();
    if (!bins[i].empty()) g.mean_spread[i] = bins[i].mean();
  }
  return g;
}

/// Spread statistics per decoder layer.  All records must carry the same
/// number of layers.
inline BinnedSeries layer_curve(const std::vector<AnalysisRecord>& records) {
  BinnedSeries out;
  if (records.empty()) return out;
  const std::size_t layers = records.front().spread_per_layer.size();
  std::vector<SampleSet> bins(layers);
  for (const auto& r : records) {
    if (r.spread_per_layer.size() != layers)
      throw FormatError(r.detection_id, -1,
                        "inconsistent layer count: expected " + std::to_string(layers) + ", got " +
                            std::to_string(r.spread_per_layer.size()));
    for (std::size_t l = 0; l < layers; ++l) bins[l].add(r.spread_per_layer[l]);
  }
  for (std::size_t l = 0; l < layers; ++l)
    out.bins.push_back(summarize(static_cast<double>(l), bins[l]));
  return out;
}

struct TrackAgeCurves {
  /// Bins over elapsed time since the first observation, centers 0, T, 2T, ...
  BinnedSeries init;
  /// Bins over remaining time until the last observation, centers -window ... 0.
  BinnedSeries final;
};

/// Spread over the start and end phase of sufficiently long tracks.  Each
/// observation joins the bin nearest to its elapsed (remaining) time; bins
/// span [0, window] in steps of the frame period.
inline TrackAgeCurves track_age_curves(const std::vector<AnalysisRecord>& records,
                                       double frame_period_s = 0.5, double window_s = 3.5,
                                       double min_track_s = 7.0,
                                       std::optional<int> layer = std::nullopt) {
  if (!(frame_period_s > 0.0) || !(window_s >= 0.0) || !(min_track_s >= 0.0))
    throw ParameterError("track age: period must be positive, window and minimum non-negative");
  const int n = static_cast<int>(std::floor(window_s / frame_period_s + 1e-9)) + 1;

  std::map<std::string, std::vector<const AnalysisRecord*>> tracks;
  for (const auto& r : records)
    if (r.track_id) tracks[*r.track_id].push_back(&r);

  std::vector<SampleSet> init(static_cast<std::size_t>(n));
  std::vector<SampleSet> fin(static_cast<std::size_t>(n));
  for (const auto& [id, obs] : tracks) {
    std::int64_t first = obs.front()->timestamp_us;
    std::int64_t last = first;
    for (const auto* r : obs) {
      first = std::min(first, r->timestamp_us);
      last = std::max(last, r->timestamp_us);
    }
    const double duration = static_cast<double>(last - first) * 1e-6;
    if (duration < min_track_s - 1e-9) continue;
    for (const auto* r : obs) {
      const double value = detail::layer_value(*r, layer);
      const double elapsed = static_cast<double>(r->timestamp_us - first) * 1e-6;
      const double remaining = static_cast<double>(last - r->timestamp_us) * 1e-6;
      const auto ie = static_cast<long long>(std::llround(elapsed / frame_period_s));
      const auto ir = static_cast<long long>(std::llround(remaining / frame_period_s));
      if (ie < n) init[static_cast<std::size_t>(ie)].add(value);
      if (ir < n) fin[static_cast<std::size_t>(n - 1 - ir)].add(value);
    }
  }

  TrackAgeCurves out;
  for (int i = 0; i < n; ++i) {
    out.init.bins.push_back(summarize(i * frame_period_s, init[static_cast<std::size_t>(i)]));
    out.final.bins.push_back(
        summarize((i - (n - 1)) * frame_period_s, fin[static_cast<std::size_t>(i)]));
  }
  return out;
}

}  // namespace attnspread
