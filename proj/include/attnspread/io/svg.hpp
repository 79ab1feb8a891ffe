#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "attnspread/geometry.hpp"
#include "attnspread/io/dataset.hpp"
#include "attnspread/spread.hpp"

namespace attnspread::io {

struct OverlayOptions {
  double n_sigma = 1.0;
  /// Decoder layer to draw; last layer when empty.
  std::optional<int> layer;
  /// Heatmap opacity = min(1, value_scale * w / max_w) over the top-K cells.
  double value_scale = 1.0;
  int k = 100;
  double pixels_per_meter = 6.0;
};

namespace detail {

inline std::string fmt3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

/// Color keyed by detection id, so a detection keeps its color across frames.
inline const char* detection_color(const std::string& id) {
  static constexpr std::array<const char*, 10> kPalette = {
      "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
      "#42d4f4", "#f032e6", "#bfef45", "#9a6324", "#469990"};
  return kPalette[fnv1a(id) % kPalette.size()];
}

}  // namespace detail

/// Renders one frame: top-K attention cells, estimated boxes (solid), ground
/// truth (dotted grey), attention means and n_sigma covariance ellipses.
/// `stats` is aligned with frame.entry.detections; empty entries (degenerate
/// attention) draw only the box.  Output depends only on the inputs.
inline std::string render_overlay_svg(const Frame& frame,
                                      const std::vector<std::optional<AttentionStats>>& stats,
                                      const OverlayOptions& options) {
  const auto& dets = frame.entry.detections;
  if (stats.size() != dets.size())
    throw ParameterError("overlay: stats must align with the frame's detections");

  GridSpec grid = default_grid();
  if (!frame.maps.empty() && !frame.maps.front().empty()) grid = frame.maps.front().front().grid();
  const double ppm = options.pixels_per_meter;
  const double max_y = grid.min_y + grid.extent();
  const auto sx = [&](double x) { return detail::fmt3((x - grid.min_x) * ppm); };
  const auto sy = [&](double y) { return detail::fmt3((max_y - y) * ppm); };
  const auto points = [&](const BevBox& b) {
    std::string s;
    for (const auto& c : box_corners(b)) s += (s.empty() ? "" : " ") + sx(c.x) + "," + sy(c.y);
    return s;
  };

  const std::string size = detail::fmt3(grid.extent() * ppm);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + size + "\" height=\"" + size +
         "\" viewBox=\"0 0 " + size + " " + size + "\">\n";
  out += "<title>frame " + frame.entry.frame_id + "</title>\n";
  out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + size + "\" height=\"" + size +
         "\" fill=\"#ffffff\"/>\n";

  out += "<g class=\"attention\">\n";
  const std::string cell = detail::fmt3(grid.cell_size * ppm);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (d >= frame.maps.size() || frame.maps[d].empty()) continue;
    const auto& layers = frame.maps[d];
    const int l = options.layer.value_or(static_cast<int>(layers.size()) - 1);
    if (l < 0 || l >= static_cast<int>(layers.size()))
      throw ParameterError("overlay: layer " + std::to_string(l) + " not available");
    const auto& map = layers[static_cast<std::size_t>(l)];
    const int k = std::min<int>(options.k, static_cast<int>(map.weights().size()));
    const TopKSelection sel = select_top_k(map, k);
    const double w_max = sel.entries.empty() ? 0.0 : sel.entries.front().weight;
    if (!(w_max > 0.0)) continue;
    const char* color = detail::detection_color(dets[d].detection_id);
    for (const auto& e : sel.entries) {
      if (!(e.weight > 0.0)) continue;
      const double opacity = std::min(1.0, options.value_scale * e.weight / w_max);
      const double left = grid.min_x + e.q * grid.cell_size;
      const double top = grid.min_y + (e.p + 1) * grid.cell_size;
      out += "<rect x=\"" + sx(left) + "\" y=\"" + sy(top) + "\" width=\"" + cell +
             "\" height=\"" + cell + "\" fill=\"" + color + "\" fill-opacity=\"" +
             detail::fmt3(opacity) + "\"/>\n";
    }
  }
  out += "</g>\n";

  out += "<g class=\"ground-truth\">\n";
  for (const auto& g : frame.entry.ground_truth)
    out += "<polygon class=\"gt-box\" points=\"" + points(g.box) +
           "\" fill=\"none\" stroke=\"#808080\" stroke-width=\"1\" stroke-dasharray=\"1,2\"/>\n";
  out += "</g>\n";

  out += "<g class=\"estimates\">\n";
  for (std::size_t d = 0; d < dets.size(); ++d) {
    const char* color = detail::detection_color(dets[d].detection_id);
    out += "<polygon class=\"est-box\" points=\"" + points(dets[d].box) + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.5\"/>\n";
    if (!stats[d]) continue;
    const AttentionStats& s = *stats[d];
    const Ellipse e = covariance_ellipse(s.covariance, options.n_sigma);
    // Radii that render as 0.000 px are treated as zero.
    if (e.semi_major * ppm >= 5e-4) {
      const double deg = -e.rotation * 180.0 / M_PI;
      out += "<ellipse class=\"ellipse\" cx=\"" + sx(s.mean.x) + "\" cy=\"" + sy(s.mean.y) +
             "\" rx=\"" + detail::fmt3(e.semi_major * ppm) + "\" ry=\"" +
             detail::fmt3(e.semi_minor * ppm) + "\" transform=\"rotate(" + detail::fmt3(deg) + " " +
             sx(s.mean.x) + " " + sy(s.mean.y) + ")\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1\"/>\n";
    }
    out += "<circle class=\"mean\" cx=\"" + sx(s.mean.x) + "\" cy=\"" + sy(s.mean.y) +
           "\" r=\"2\" fill=\"" + color + "\"/>\n";
  }
  out += "</g>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace attnspread::io
