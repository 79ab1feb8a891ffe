#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "attnspread/geometry.hpp"
#include "attnspread/io/dataset.hpp"
#include "attnspread/spread.hpp"
#include "attnspread/stats.hpp"

namespace attnspread {

struct DetectionResult {
  /// One entry per layer; empty where the top-K weights were all zero.
  std::vector<std::optional<AttentionStats>> layers;
  MatchResult match;

  bool degenerate() const {
    return std::any_of(layers.begin(), layers.end(), [](const auto& s) { return !s.has_value(); });
  }
};

struct FrameResult {
  std::vector<DetectionResult> detections;
};

inline FrameResult analyze_frame(const io::Frame& frame, int k, MatchMode mode) {
  FrameResult out;
  std::vector<LabeledBox> estimates, truth;
  for (const auto& d : frame.entry.detections) estimates.push_back({d.detection_id, d.box, d.cls});
  for (const auto& g : frame.entry.ground_truth) truth.push_back({g.gt_id, g.box, g.cls});
  const auto matches = match_closest_gt(estimates, truth, std::nullopt, mode);

  for (std::size_t d = 0; d < frame.entry.detections.size(); ++d) {
    DetectionResult r;
    for (const auto& map : frame.maps[d]) {
      try {
        r.layers.emplace_back(analyze_map(map, k));
      } catch (const DegenerateAttentionError&) {
        r.layers.emplace_back(std::nullopt);
      }
    }
    r.match = matches[d];
    out.detections.push_back(std::move(r));
  }
  return out;
}

/// Loads and analyzes every frame, spreading frames over `threads` workers.
/// Results are indexed by frame, so they do not depend on scheduling.  The
/// error of the lowest failing frame is rethrown.
inline std::vector<FrameResult> analyze_dataset(const io::DatasetReader& reader, int k,
                                                MatchMode mode = MatchMode::kMaxIou,
                                                int threads = 1) {
  const std::size_t n = reader.frame_count();
  std::vector<FrameResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = analyze_frame(reader.load_frame(i), k, mode);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

/// Joins frame metadata with analysis results.  Detections with degenerate
/// attention in any layer are left out; `skipped` counts them.
inline std::vector<AnalysisRecord> make_records(const io::DatasetReader& reader,
                                                const std::vector<FrameResult>& results,
                                                std::size_t* skipped = nullptr) {
  std::vector<AnalysisRecord> out;
  std::size_t dropped = 0;
  for (std::size_t f = 0; f < results.size(); ++f) {
    const auto& entry = reader.entry(f);
    for (std::size_t d = 0; d < results[f].detections.size(); ++d) {
      const auto& res = results[f].detections[d];
      if (res.degenerate()) {
        ++dropped;
        continue;
      }
      const auto& det = entry.detections[d];
      AnalysisRecord r;
      r.frame_id = entry.frame_id;
      r.detection_id = det.detection_id;
      r.track_id = det.track_id;
      r.score = det.score;
      r.cls = det.cls;
      r.box = det.box;
      r.iou = res.match.iou;
      r.timestamp_us = entry.timestamp_us;
      for (const auto& s : res.layers) r.spread_per_layer.push_back(s->spread);
      out.push_back(std::move(r));
    }
  }
  if (skipped) *skipped = dropped;
  return out;
}

}  // namespace attnspread
