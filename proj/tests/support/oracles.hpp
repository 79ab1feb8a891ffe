#pragma once

// Reference computations for tests.  Deliberately naive: no shared code with
// the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

struct Moments {
  double mx = 0, my = 0;
  double cxx = 0, cxy = 0, cyy = 0;
  double det = 0;
};

/// Top-k moments of a row-major side x side map.  Selection by repeated
/// linear scan for the largest unused weight (lowest index on ties).
inline Moments top_k_moments(const std::vector<double>& w, int side, double min_x, double min_y,
                             double cell, int k) {
  std::vector<char> used(w.size(), 0);
  std::vector<long double> xs, ys, ws;
  const bool all = static_cast<std::size_t>(k) == w.size();
  for (int n = 0; n < k; ++n) {
    std::size_t best = all ? static_cast<std::size_t>(n) : w.size();
    if (!all)
      for (std::size_t i = 0; i < w.size(); ++i)
        if (!used[i] && (best == w.size() || w[i] > w[best])) best = i;
    used[best] = 1;
    const long double row = static_cast<long double>(best / static_cast<std::size_t>(side));
    const long double col = static_cast<long double>(best % static_cast<std::size_t>(side));
    xs.push_back(min_x + (col + 0.5L) * cell);
    ys.push_back(min_y + (row + 0.5L) * cell);
    ws.push_back(w[best]);
  }
  long double total = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    total += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const long double mx = sx / total, my = sy / total;
  long double xx = 0, xy = 0, yy = 0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    xx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    xy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    yy += ws[i] * (ys[i] - my) * (ys[i] - my);
  }
  Moments m;
  m.mx = static_cast<double>(mx);
  m.my = static_cast<double>(my);
  m.cxx = static_cast<double>(xx / total);
  m.cxy = static_cast<double>(xy / total);
  m.cyy = static_cast<double>(yy / total);
  m.det = static_cast<double>((xx / total) * (yy / total) - (xy / total) * (xy / total));
  return m;
}

struct Box {
  double cx, cy, length, width, yaw;
};

inline bool inside(const Box& b, double x, double y) {
  const double dx = x - b.cx, dy = y - b.cy;
  const double u = std::cos(b.yaw) * dx + std::sin(b.yaw) * dy;
  const double v = -std::sin(b.yaw) * dx + std::cos(b.yaw) * dy;
  return std::abs(u) <= b.length / 2 && std::abs(v) <= b.width / 2;
}

/// IoU estimated on a stratified n x n lattice (jittered) over the joint
/// bounding square of both boxes.
inline double lattice_iou(const Box& a, const Box& b, int n, std::uint64_t seed) {
  const double ra = std::hypot(a.length, a.width) / 2, rb = std::hypot(b.length, b.width) / 2;
  const double lo_x = std::min(a.cx - ra, b.cx - rb), hi_x = std::max(a.cx + ra, b.cx + rb);
  const double lo_y = std::min(a.cy - ra, b.cy - rb), hi_y = std::max(a.cy + ra, b.cy + rb);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long long both = 0, either = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = lo_x + (i + u(rng)) / n * (hi_x - lo_x);
      const double y = lo_y + (j + u(rng)) / n * (hi_y - lo_y);
      const bool ia = inside(a, x, y), ib = inside(b, x, y);
      both += ia && ib;
      either += ia || ib;
    }
  return either ? static_cast<double>(both) / static_cast<double>(either) : 0.0;
}

/// Percentile by bubble-sort and direct interpolation of rank q/100*(n-1).
inline double percentile(std::vector<double> v, double q) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j)
      if (v[j] > v[j + 1]) std::swap(v[j], v[j + 1]);
  const double rank = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (rank - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace oracle
