#pragma once

// Synthetic attention maps and scenes with known properties, and brute-force
// reference computations that share no accumulation code with spread.hpp.
//
// All randomness comes from std::mt19937_64 seeded with one 64-bit value;
// doubles in [0, 1) are formed from the top 53 bits of each draw, so output
// does not depend on the standard library's distribution implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "attnspread/error.hpp"
#include "attnspread/geometry.hpp"
#include "attnspread/grid.hpp"
#include "attnspread/io/blob.hpp"
#include "attnspread/io/dataset.hpp"
#include "attnspread/spread.hpp"

namespace attnspread::synth {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct GaussianSpec {
  Vec2 mean;
  SymMat2 covariance{1.0, 0.0, 1.0};
  /// Uniform background added to every cell before normalization.
  double floor = 0.0;
  /// Optional multiplicative noise: each weight is scaled by U(1-noise, 1+noise).
  double noise = 0.0;
};

/// w(p,q) = exp(-0.5 d' S^-1 d) + floor with d = cell center - mean,
/// normalized to unit sum.
inline AttentionMap gen_gaussian_map(const GridSpec& grid, const GaussianSpec& spec,
                                     std::uint64_t seed = 0, int layer_index = 0,
                                     std::string detection_ref = {}) {
  grid.validate();
  const double det = spec.covariance.det();
  if (!(spec.covariance.xx > 0.0) || !(det > 0.0) || !std::isfinite(det))
    throw ParameterError("gaussian map: covariance must be symmetric positive definite");
  if (!(spec.floor >= 0.0) || !(spec.noise >= 0.0 && spec.noise < 1.0))
    throw ParameterError("gaussian map: floor must be >= 0 and noise in [0, 1)");
  const double ixx = spec.covariance.yy / det;
  const double ixy = -spec.covariance.xy / det;
  const double iyy = spec.covariance.xx / det;

  Rng rng(seed);
  const int n = grid.size_cells;
  std::vector<double> w(grid.cell_count());
  double total = 0.0;
  for (int p = 0; p < n; ++p) {
    const double dy = cell_center_y(grid, p) - spec.mean.y;
    for (int q = 0; q < n; ++q) {
      const double dx = cell_center_x(grid, q) - spec.mean.x;
      double v = std::exp(-0.5 * (ixx * dx * dx + 2.0 * ixy * dx * dy + iyy * dy * dy)) + spec.floor;
      if (spec.noise > 0.0) v *= rng.uniform(1.0 - spec.noise, 1.0 + spec.noise);
      w[static_cast<std::size_t>(p) * n + q] = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw ParameterError("gaussian map: all weights underflowed");
  for (double& v : w) v /= total;
  return AttentionMap(grid, std::move(w), layer_index, std::move(detection_ref));
}

/// Independent uniform weights in [0, 1).
inline AttentionMap gen_random_map(const GridSpec& grid, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(grid.cell_count());
  for (double& v : w) v = rng.uniform();
  return AttentionMap(grid, std::move(w));
}

struct Moments {
  Vec2 mean;
  SymMat2 covariance;
  double spread = 0.0;
};

/// Reference top-K moments: stable full sort of all N weights, then scalar
/// two-pass accumulation from the smallest selected weight upward.
inline Moments brute_force_moments(const AttentionMap& map, int k) {
  const auto& w = map.weights();
  const int n = static_cast<int>(w.size());
  if (k < 1 || k > n) throw ParameterError("brute force moments: k out of range");
  std::vector<int> idx(w.size());
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::stable_sort(idx.begin(), idx.end(), [&w](int a, int b) { return w[a] > w[b]; });

  const GridSpec& g = map.grid();
  const int side = g.size_cells;
  std::vector<double> xs, ys, ws;
  for (int i = k - 1; i >= 0; --i) {
    const int cell = idx[static_cast<std::size_t>(i)];
    const int row = cell / side;
    const int col = cell - row * side;
    xs.push_back(g.min_x + col * g.cell_size + g.cell_size / 2);
    ys.push_back(g.min_y + row * g.cell_size + g.cell_size / 2);
    ws.push_back(w[static_cast<std::size_t>(cell)]);
  }
  double total = 0.0;
  for (double v : ws) total += v;
  if (total == 0.0) throw DegenerateAttentionError("brute force moments: zero total weight");

  Moments m;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    mx += ws[i] * xs[i] / total;
    my += ws[i] * ys[i] / total;
  }
  m.mean = {mx, my};
  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double ex = xs[i] - mx;
    const double ey = ys[i] - my;
    cxx += ws[i] * ex * ex / total;
    cxy += ws[i] * ex * ey / total;
    cyy += ws[i] * ey * ey / total;
  }
  m.covariance = {cxx, cxy, cyy};
  m.spread = cxx * cyy - cxy * cxy;
  return m;
}

namespace detail {

inline bool inside_box(const BevBox& b, double x, double y) {
  const double dx = x - b.cx;
  const double dy = y - b.cy;
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  return std::abs(u) <= 0.5 * b.length && std::abs(v) <= 0.5 * b.width;
}

}  // namespace detail

/// Rejection-sampled IoU over the joint axis-aligned envelope of both boxes.
inline double monte_carlo_iou(const BevBox& a, const BevBox& b, long long samples,
                              std::uint64_t seed) {
  if (samples < 10000) throw ParameterError("monte carlo iou: need at least 1e4 samples");
  double lo_x = a.cx, hi_x = a.cx, lo_y = a.cy, hi_y = a.cy;
  for (const BevBox* box : {&a, &b}) {
    const double r = 0.5 * std::hypot(box->length, box->width);
    lo_x = std::min(lo_x, box->cx - r);
    hi_x = std::max(hi_x, box->cx + r);
    lo_y = std::min(lo_y, box->cy - r);
    hi_y = std::max(hi_y, box->cy + r);
  }
  Rng rng(seed);
  long long both = 0, either = 0;
  for (long long i = 0; i < samples; ++i) {
    const double x = rng.uniform(lo_x, hi_x);
    const double y = rng.uniform(lo_y, hi_y);
    const bool in_a = detail::inside_box(a, x, y);
    const bool in_b = detail::inside_box(b, x, y);
    both += (in_a && in_b) ? 1 : 0;
    either += (in_a || in_b) ? 1 : 0;
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

// ---------------------------------------------------------------------------
// Scene datasets

/// Intended last-layer spread = vs_iou(iou) * vs_range(range).  vs_iou must
/// be strictly decreasing and vs_range strictly increasing, both positive.
struct SpreadRelation {
  std::function<double(double)> vs_iou = [](double iou) { return 8.0 / (iou + 0.1); };
  std::function<double(double)> vs_range = [](double r) { return 1.0 + 0.5 * r / 70.0; };
};

struct SceneParams {
  std::uint64_t seed = 1;
  int n_frames = 40;
  int n_tracks = 12;
  double frame_period_s = 0.5;
  GridSpec grid{64, -57.6, -57.6, 1.8};
  int layer_count = 6;
  int queries_per_frame = 100;
  /// K used when calibrating Gaussian widths to target spreads.
  int k = 100;
  SpreadRelation relation;
  /// Spread multiplier per decoder layer; the last layer should be 1.
  std::vector<double> layer_multipliers{2.5, 0.7, 1.8, 1.4, 2.2, 1.0};
  /// Every n-th track (1-based) is shorter than min_track_s.
  int short_track_every = 4;
  bool clutter = true;
  // Binning used for the bookkeeping sidecar.
  double iou_bin_width = 0.1;
  int spatial_bins = 20;
  double spatial_extent = 51.2;
  double track_window_s = 3.5;
  double min_track_s = 7.0;
};

struct IntendedBins {
  std::optional<int> iou_bin;
  std::optional<std::pair<int, int>> spatial_bin;
  std::optional<int> init_bin;
  std::optional<int> final_bin;
};

struct BookkeepingEntry {
  std::string detection_id;
  std::string frame_id;
  std::optional<std::string> track_id;
  double intended_iou = 0.0;
  double intended_spread = 0.0;
  bool filtered = false;
  IntendedBins bins;
};

struct SceneSummary {
  std::size_t frames = 0;
  std::size_t detections = 0;
  std::size_t long_tracks = 0;
  std::vector<BookkeepingEntry> bookkeeping;
};

inline constexpr const char* kBookkeepingFileName = "bookkeeping.jsonl";

/// Monotone table from isotropic Gaussian width to top-K attention spread,
/// measured on a cell-centered Gaussian of the scene grid.
class SpreadCalibration {
 public:
  SpreadCalibration(const GridSpec& grid, int k) : grid_(grid) {
    const int c = grid.size_cells / 2;
    center_ = cell_center(grid, c, c);
    const double lo = std::log(0.02 * grid.cell_size);
    const double hi = std::log(20.0 * grid.cell_size);
    constexpr int kSteps = 320;
    double running = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
      const double sigma = std::exp(lo + (hi - lo) * i / kSteps);
      const auto map = gen_gaussian_map(grid, {center_, {sigma * sigma, 0.0, sigma * sigma}});
      running = std::max(running, analyze_map(map, std::min<int>(k, static_cast<int>(grid.cell_count()))).spread);
      sigmas_.push_back(sigma);
      spreads_.push_back(running);
    }
  }

  /// Width whose map reaches `target` spread; clamps to the table range.
  double sigma_for(double target) const {
    if (target <= spreads_.front()) return sigmas_.front();
    if (target >= spreads_.back()) return sigmas_.back();
    const auto it = std::lower_bound(spreads_.begin(), spreads_.end(), target);
    const auto i = static_cast<std::size_t>(it - spreads_.begin());
    const double s0 = spreads_[i - 1], s1 = spreads_[i];
    const double t = s1 > s0 ? (target - s0) / (s1 - s0) : 1.0;
    return std::exp(std::log(sigmas_[i - 1]) + t * (std::log(sigmas_[i]) - std::log(sigmas_[i - 1])));
  }

  double max_spread() const { return spreads_.back(); }

 private:
  GridSpec grid_;
  Vec2 center_;
  std::vector<double> sigmas_;
  std::vector<double> spreads_;
};

namespace detail {

inline std::string padded(const char* prefix, int v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, v);
  return buf;
}

/// Nudges an IoU target at least 2% of a bin width away from bin edges.
inline double away_from_edges(double iou, double bin_width) {
  const double u = iou / bin_width;
  const double base = std::floor(u);
  const double frac = u - base;
  if (frac < 0.02) return (base + 0.02) * bin_width;
  if (frac > 0.98) return (base + 0.98) * bin_width;
  return iou;
}

/// Estimate box translated along `dir` so that its IoU with `gt` hits `target`.
inline BevBox jitter_to_iou(const BevBox& gt, double target, double dir) {
  double lo = 0.0;
  double hi = gt.length + gt.width;
  const auto shifted = [&](double t) {
    BevBox b = gt;
    b.cx += t * std::cos(dir);
    b.cy += t * std::sin(dir);
    return b;
  };
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (iou_bev(shifted(mid), gt) > target) lo = mid;
    else hi = mid;
  }
  return shifted(0.5 * (lo + hi));
}

inline io::TensorBlob layers_to_blob(const std::vector<AttentionMap>& maps) {
  io::TensorBlob blob;
  const auto side = static_cast<std::uint32_t>(maps.front().grid().size_cells);
  blob.dims = {static_cast<std::uint32_t>(maps.size()), side, side};
  for (const auto& m : maps)
    for (double w : m.weights()) blob.values.push_back(static_cast<float>(w));
  return blob;
}

inline nlohmann::json bookkeeping_to_json(const BookkeepingEntry& e) {
  using nlohmann::json;
  const auto opt_int = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
  json bins = {{"iou_bin", opt_int(e.bins.iou_bin)},
               {"spatial_bin", e.bins.spatial_bin
                                   ? json::array({e.bins.spatial_bin->first, e.bins.spatial_bin->second})
                                   : json(nullptr)},
               {"init_bin", opt_int(e.bins.init_bin)},
               {"final_bin", opt_int(e.bins.final_bin)}};
  return {{"detection_id", e.detection_id},
          {"frame_id", e.frame_id},
          {"track_id", e.track_id ? json(*e.track_id) : json(nullptr)},
          {"intended_iou", e.intended_iou},
          {"intended_spread", e.intended_spread},
          {"filtered", e.filtered},
          {"intended_bins", std::move(bins)}};
}

}  // namespace detail

/// Reads a bookkeeping sidecar back.
inline std::vector<BookkeepingEntry> read_bookkeeping(const std::filesystem::path& path) {
  const std::string text = io::read_text_file(path);
  std::vector<BookkeepingEntry> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    BookkeepingEntry e;
    e.detection_id = j.at("detection_id").get<std::string>();
    e.frame_id = j.at("frame_id").get<std::string>();
    if (!j.at("track_id").is_null()) e.track_id = j.at("track_id").get<std::string>();
    e.intended_iou = j.at("intended_iou").get<double>();
    e.intended_spread = j.at("intended_spread").get<double>();
    e.filtered = j.at("filtered").get<bool>();
    const auto& b = j.at("intended_bins");
    if (!b.at("iou_bin").is_null()) e.bins.iou_bin = b.at("iou_bin").get<int>();
    if (!b.at("spatial_bin").is_null())
      e.bins.spatial_bin = {b.at("spatial_bin").at(0).get<int>(), b.at("spatial_bin").at(1).get<int>()};
    if (!b.at("init_bin").is_null()) e.bins.init_bin = b.at("init_bin").get<int>();
    if (!b.at("final_bin").is_null()) e.bins.final_bin = b.at("final_bin").get<int>();
    out.push_back(std::move(e));
  }
  return out;
}

/// Writes a synthetic scene dataset into `dir`.
///
/// Tracks drive along parallel lanes (one track per lane and time slot) so
/// that no estimate overlaps a foreign ground truth.  Each estimate is the
/// ground-truth box translated until its IoU reaches a target that falls
/// linearly with range, so low IoU coincides with large range.  Attention
/// maps are isotropic Gaussians centered on the object's cell whose width is
/// calibrated to give the intended spread for each layer.
inline SceneSummary gen_scene_dataset(const std::filesystem::path& dir, const SceneParams& params) {
  namespace fs = std::filesystem;
  if (params.n_frames < 2 || params.n_tracks < 1 || !(params.frame_period_s > 0.0) ||
      params.layer_count < 1 || params.k < 1)
    throw ParameterError("scene: frames >= 2, tracks >= 1, positive period, layers and k required");
  if (static_cast<int>(params.layer_multipliers.size()) < params.layer_count)
    throw ParameterError("scene: need one spread multiplier per layer");
  params.grid.validate();

  Rng rng(params.seed);
  const SpreadCalibration calibration(params.grid, params.k);

  constexpr int kMaxLanes = 12;
  constexpr double kLaneSpan = 48.0;
  constexpr double kRangeRef = 70.0;
  const int n_lanes = std::min(params.n_tracks, kMaxLanes);
  const int n_slots = (params.n_tracks + n_lanes - 1) / n_lanes;
  const int slot_len = params.n_frames / n_slots;
  if (slot_len < 2) throw ParameterError("scene: too few frames for the number of tracks");
  const int short_len = std::max(
      2, std::min(slot_len, static_cast<int>(std::floor(params.min_track_s / params.frame_period_s)) - 2));
  const double speed = 2.0 * kLaneSpan / ((slot_len - 1) * params.frame_period_s);

  struct Track {
    std::string id;
    int first_frame = 0;
    int length = 0;
    double y = 0.0;
    double x0 = 0.0;
    double dir = 1.0;
    double box_length = 4.5;
    double box_width = 1.9;
    int missed_local = -1;
    bool is_long = false;
  };
  std::vector<Track> tracks;
  for (int j = 0; j < params.n_tracks; ++j) {
    Track t;
    t.id = detail::padded("t", j, 3);
    const int lane = j % n_lanes;
    const int slot = j / n_lanes;
    const bool is_short = params.short_track_every > 0 && (j + 1) % params.short_track_every == 0;
    t.first_frame = slot * slot_len;
    t.length = is_short ? short_len : slot_len;
    t.y = (n_lanes == 1 ? 0.0 : -kLaneSpan + 2.0 * kLaneSpan * lane / (n_lanes - 1)) +
          rng.uniform(-0.5, 0.5);
    t.dir = lane % 2 == 0 ? 1.0 : -1.0;
    t.x0 = -t.dir * kLaneSpan + rng.uniform(-1.0, 1.0);
    t.box_length = rng.uniform(4.2, 4.8);
    t.box_width = rng.uniform(1.8, 2.0);
    if (!is_short && j % 2 == 0 && t.length > 6) t.missed_local = 2 + j % 3;
    t.is_long = (t.length - 1) * params.frame_period_s >= params.min_track_s - 1e-9;
    tracks.push_back(t);
  }

  const int n_track_bins = static_cast<int>(std::floor(params.track_window_s / params.frame_period_s + 1e-9)) + 1;
  const double spatial_w = 2.0 * params.spatial_extent / params.spatial_bins;
  const int n_iou_bins = std::max(1, static_cast<int>(std::ceil(1.0 / params.iou_bin_width - 1e-9)));

  fs::create_directories(dir / "blobs");
  std::vector<io::FrameEntry> frames;
  SceneSummary summary;
  for (const auto& t : tracks) summary.long_tracks += t.is_long ? 1 : 0;

  const auto make_maps = [&](Vec2 center, double last_layer_spread, const std::string& ref) {
    const CellIndex cell = cell_of(params.grid, center);
    const Vec2 mean = cell_center(params.grid, cell.p, cell.q);
    std::vector<AttentionMap> maps;
    for (int l = 0; l < params.layer_count; ++l) {
      const double sigma =
          calibration.sigma_for(last_layer_spread * params.layer_multipliers[static_cast<std::size_t>(l)]);
      maps.push_back(gen_gaussian_map(params.grid, {mean, {sigma * sigma, 0.0, sigma * sigma}}, 0, l, ref));
    }
    return maps;
  };

  for (int f = 0; f < params.n_frames; ++f) {
    io::FrameEntry frame;
    frame.frame_id = detail::padded("f", f, 4);
    frame.timestamp_us = static_cast<std::int64_t>(std::llround(f * params.frame_period_s * 1e6));
    int det_index = 0;
    const auto add_detection = [&](io::DetectionEntry det, const std::vector<AttentionMap>& maps,
                                   BookkeepingEntry bk) {
      det.detection_id = frame.frame_id + "_" + detail::padded("d", det_index, 3);
      det.query_index = det_index % params.queries_per_frame;
      det.attention_blob = "blobs/" + det.detection_id + ".atnb";
      io::write_blob(dir / det.attention_blob, detail::layers_to_blob(maps));
      bk.detection_id = det.detection_id;
      bk.frame_id = frame.frame_id;
      bk.track_id = det.track_id;
      frame.detections.push_back(std::move(det));
      summary.bookkeeping.push_back(std::move(bk));
      ++det_index;
    };

    for (const auto& t : tracks) {
      const int local = f - t.first_frame;
      if (local < 0 || local >= t.length) continue;
      const double direction = rng.uniform(-M_PI, M_PI);
      const double score = rng.uniform(0.85, 0.99);
      BevBox gt{t.x0 + t.dir * speed * params.frame_period_s * local, t.y, t.box_length, t.box_width,
                t.dir > 0 ? 0.0 : M_PI};
      frame.ground_truth.push_back({frame.frame_id + "_g" + t.id, t.id, "car", gt});
      if (local == t.missed_local) continue;

      const double range = std::hypot(gt.cx, gt.cy);
      const double target = detail::away_from_edges(
          0.97 - 0.94 * std::min(range / kRangeRef, 1.0), params.iou_bin_width);
      const BevBox est = detail::jitter_to_iou(gt, target, direction);
      const double iou = iou_bev(est, gt);
      const double spread = params.relation.vs_iou(iou) * params.relation.vs_range(range);

      BookkeepingEntry bk;
      bk.intended_iou = iou;
      bk.intended_spread = spread;
      bk.bins.iou_bin = std::clamp(static_cast<int>(std::floor(iou / params.iou_bin_width + 1e-9)), 0,
                                   n_iou_bins - 1);
      const double bx = std::floor((est.cx + params.spatial_extent) / spatial_w);
      const double by = std::floor((est.cy + params.spatial_extent) / spatial_w);
      if (bx >= 0 && by >= 0 && bx < params.spatial_bins && by < params.spatial_bins)
        bk.bins.spatial_bin = std::make_pair(static_cast<int>(bx), static_cast<int>(by));
      if (t.is_long) {
        if (local < n_track_bins) bk.bins.init_bin = local;
        const int remaining = t.length - 1 - local;
        if (remaining < n_track_bins) bk.bins.final_bin = n_track_bins - 1 - remaining;
      }

      io::DetectionEntry det;
      det.track_id = t.id;
      det.score = score;
      det.cls = "car";
      det.box = est;
      add_detection(std::move(det), make_maps(gt.center(), spread, t.id), std::move(bk));
    }

    if (params.clutter) {
      // A low-confidence car and a confident pedestrian; both are removed by
      // the default score and class filters.
      const double gap_y = -kLaneSpan + kLaneSpan / std::max(1, n_lanes - 1);
      BevBox ghost{rng.uniform(-40.0, 40.0), gap_y, 4.4, 1.9, 0.0};
      io::DetectionEntry low;
      low.score = rng.uniform(0.3, 0.7);
      low.cls = "car";
      low.box = ghost;
      BookkeepingEntry bk_low;
      bk_low.filtered = true;
      add_detection(std::move(low), make_maps(ghost.center(), 5.0, "clutter"), std::move(bk_low));

      BevBox ped{rng.uniform(-40.0, 40.0), -gap_y, 0.8, 0.8, 0.0};
      frame.ground_truth.push_back({frame.frame_id + "_gped", std::nullopt, "pedestrian", ped});
      io::DetectionEntry pd;
      pd.score = rng.uniform(0.85, 0.99);
      pd.cls = "pedestrian";
      pd.box = ped;
      pd.box.cx += 0.1;
      BookkeepingEntry bk_ped;
      bk_ped.filtered = true;
      bk_ped.intended_iou = iou_bev(pd.box, ped);
      add_detection(std::move(pd), make_maps(ped.center(), 3.0, "pedestrian"), std::move(bk_ped));
    }
    frames.push_back(std::move(frame));
  }

  io::DatasetMeta meta;
  meta.grid = params.grid;
  meta.layer_count = params.layer_count;
  meta.queries_per_frame = params.queries_per_frame;
  meta.frame_period_s = params.frame_period_s;
  meta.class_list = {"car", "pedestrian"};
  io::write_dataset_index(dir, meta, frames);

  std::ofstream bk_out(dir / kBookkeepingFileName, std::ios::trunc);
  if (!bk_out) throw IoError("cannot write " + (dir / kBookkeepingFileName).string());
  for (const auto& e : summary.bookkeeping) bk_out << detail::bookkeeping_to_json(e).dump() << '\n';

  summary.frames = frames.size();
  summary.detections = summary.bookkeeping.size();
  return summary;
}

}  // namespace attnspread::synth
