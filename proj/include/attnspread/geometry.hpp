#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "attnspread/linalg.hpp"

namespace attnspread {

/// Oriented rectangle in the ground plane.  `length` runs along the heading.
struct BevBox {
  double cx = 0.0;
  double cy = 0.0;
  double length = 1.0;
  double width = 1.0;
  double yaw = 0.0;

  bool valid() const {
    return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(yaw) &&
           std::isfinite(length) && std::isfinite(width) && length > 0.0 && width > 0.0;
  }
  double area() const { return length * width; }
  Vec2 center() const { return {cx, cy}; }
};

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

using Polygon = std::vector<Vec2>;

inline std::array<Vec2, 4> box_corners(const BevBox& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hl = 0.5 * b.length;
  const double hw = 0.5 * b.width;
  const std::array<Vec2, 4> local{{{-hl, -hw}, {hl, -hw}, {hl, hw}, {-hl, hw}}};
  std::array<Vec2, 4> out{};
  for (std::size_t i = 0; i < 4; ++i)
    out[i] = {b.cx + c * local[i].x - s * local[i].y, b.cy + s * local[i].x + c * local[i].y};
  return out;
}

/// Shoelace area; orientation-agnostic.
inline double polygon_area(const Polygon& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    twice += cross(poly[j], poly[i]);
  return 0.5 * std::abs(twice);
}

/// Sutherland-Hodgman clipping of a convex polygon against a convex clip
/// polygon, both counter-clockwise.  Points within 1e-9 m of a clip edge
/// count as inside.
inline Polygon convex_clip(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  if (clip.size() < 3) return {};
  for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
    const Vec2 a = clip[i];
    const Vec2 b = clip[(i + 1) % clip.size()];
    const Vec2 edge = b - a;
    const double tol = 1e-9 * norm(edge);
    Polygon in = std::move(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Vec2 s = in[j == 0 ? in.size() - 1 : j - 1];
      const Vec2 e = in[j];
      const double ss = cross(edge, s - a);
      const double se = cross(edge, e - a);
      const bool s_in = ss >= -tol;
      const bool e_in = se >= -tol;
      if (e_in) {
        if (!s_in) out.push_back(s + (ss / (ss - se)) * (e - s));
        out.push_back(e);
      } else if (s_in) {
        out.push_back(s + (ss / (ss - se)) * (e - s));
      }
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

inline Polygon to_polygon(const BevBox& b) {
  const auto c = box_corners(b);
  return Polygon(c.begin(), c.end());
}

inline double intersection_area(const BevBox& a, const BevBox& b) {
  const double area = polygon_area(convex_clip(to_polygon(a), to_polygon(b)));
  return area < 1e-12 ? 0.0 : area;
}

inline double iou_bev(const BevBox& a, const BevBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

struct LabeledBox {
  std::string id;
  BevBox box;
  std::string cls;
};

struct MatchResult {
  std::string estimate_id;
  std::optional<std::string> ground_truth_id;
  double iou = 0.0;
};

enum class MatchMode {
  /// Ground truth with the largest IoU; ties by center distance, then id.
  kMaxIou,
  /// Ground truth with the nearest center; ties by id.
  kNearestCenter,
};

/// Pairs each estimate with its closest same-class ground truth.  Matching is
/// not exclusive: several estimates may share one ground truth.
inline std::vector<MatchResult> match_closest_gt(
    const std::vector<LabeledBox>& estimates, const std::vector<LabeledBox>& ground_truth,
    const std::optional<std::string>& class_filter = std::nullopt,
    MatchMode mode = MatchMode::kMaxIou) {
  std::vector<MatchResult> out;
  for (const auto& est : estimates) {
    if (class_filter && est.cls != *class_filter) continue;
    MatchResult r{est.id, std::nullopt, 0.0};
    const LabeledBox* best = nullptr;
    double best_iou = 0.0;
    double best_dist = 0.0;
    for (const auto& gt : ground_truth) {
      if (gt.cls != est.cls) continue;
      const double iou = iou_bev(est.box, gt.box);
      const double dist = norm(gt.box.center() - est.box.center());
      bool better = false;
      if (best == nullptr) {
        better = true;
      } else if (mode == MatchMode::kMaxIou) {
        better = iou > best_iou ||
                 (iou == best_iou && (dist < best_dist || (dist == best_dist && gt.id < best->id)));
      } else {
        better = dist < best_dist || (dist == best_dist && gt.id < best->id);
      }
      if (better) {
        best = &gt;
        best_iou = iou;
        best_dist = dist;
      }
    }
    if (best != nullptr && best_iou > 0.0) {
      r.ground_truth_id = best->id;
      r.iou = best_iou;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace attnspread
