#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "attnspread/error.hpp"
#include "attnspread/grid.hpp"
#include "attnspread/linalg.hpp"

namespace attnspread {

/// Cross-attention weights of one query in one decoder layer, laid out
/// row-major over the grid (row p, column q).
class AttentionMap {
 public:
  AttentionMap() = default;

  AttentionMap(GridSpec grid, std::vector<double> weights, int layer_index = 0,
               std::string detection_ref = {})
      : grid_(grid),
        weights_(std::move(weights)),
        layer_index_(layer_index),
        detection_ref_(std::move(detection_ref)) {
    grid_.validate();
    if (weights_.size() != grid_.cell_count())
      throw ParameterError("attention map: expected " + std::to_string(grid_.cell_count()) +
                           " weights, got " + std::to_string(weights_.size()));
    for (double w : weights_)
      if (!std::isfinite(w) || w < 0.0)
        throw ParameterError("attention map: weights must be finite and non-negative");
  }

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  int layer_index() const { return layer_index_; }
  const std::string& detection_ref() const { return detection_ref_; }

  double at(int p, int q) const {
    return weights_[static_cast<std::size_t>(p) * grid_.size_cells + q];
  }

 private:
  GridSpec grid_{};
  std::vector<double> weights_;
  int layer_index_ = 0;
  std::string detection_ref_;
};

struct TopKEntry {
  int p = 0;
  int q = 0;
  double weight = 0.0;
};

/// The K largest weights, ordered by weight descending then row-major index.
struct TopKSelection {
  std::vector<TopKEntry> entries;
  double total_weight = 0.0;
};

struct AttentionStats {
  Vec2 mean;
  SymMat2 covariance;
  double spread = 0.0;
  int k_used = 0;
  double total_weight = 0.0;
};

struct Ellipse {
  Vec2 center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double rotation = 0.0;
};

inline TopKSelection select_top_k(const AttentionMap& map, int k) {
  const auto& w = map.weights();
  const auto n = static_cast<long long>(w.size());
  if (k < 1 || k > n)
    throw ParameterError("top-k: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                         "]");

  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto before = [&w](std::size_t a, std::size_t b) {
    return w[a] > w[b] || (w[a] == w[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), before);

  const int side = map.grid().size_cells;
  TopKSelection sel;
  sel.entries.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const std::size_t idx = order[static_cast<std::size_t>(i)];
    sel.entries.push_back({static_cast<int>(idx / side), static_cast<int>(idx % side), w[idx]});
    sel.total_weight += w[idx];
  }
  return sel;
}

inline Vec2 attention_mean(const TopKSelection& sel, const GridSpec& grid) {
  if (!(sel.total_weight > 0.0))
    throw DegenerateAttentionError("attention mean: all selected weights are zero");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& e : sel.entries) {
    const Vec2 c = cell_center(grid, e.p, e.q);
    sx += e.weight * c.x;
    sy += e.weight * c.y;
  }
  return {sx / sel.total_weight, sy / sel.total_weight};
}

inline SymMat2 attention_covariance(const TopKSelection& sel, const GridSpec& grid, Vec2 mean) {
  if (!(sel.total_weight > 0.0))
    throw DegenerateAttentionError("attention covariance: all selected weights are zero");
  SymMat2 c;
  for (const auto& e : sel.entries) {
    const Vec2 d = cell_center(grid, e.p, e.q) - mean;
    c.xx += e.weight * d.x * d.x;
    c.xy += e.weight * d.x * d.y;
    c.yy += e.weight * d.y * d.y;
  }
  c.xx /= sel.total_weight;
  c.xy /= sel.total_weight;
  c.yy /= sel.total_weight;
  return c;
}

/// Determinant of the covariance.  Slightly negative values from roundoff
/// clamp to zero; anything below -1e-12 * max(1, trace^2) is rejected.
inline double attention_spread(const SymMat2& cov) {
  const double det = cov.det();
  if (det >= 0.0) return det;
  const double tr = cov.trace();
  const double eps = 1e-12 * std::max(1.0, tr * tr);
  if (det < -eps) throw InvalidCovarianceError("attention spread: determinant " +
                                               std::to_string(det) + " is negative");
  return 0.0;
}

inline AttentionStats analyze_map(const AttentionMap& map, int k) {
  const TopKSelection sel = select_top_k(map, k);
  AttentionStats s;
  s.mean = attention_mean(sel, map.grid());
  s.covariance = attention_covariance(sel, map.grid(), s.mean);
  s.spread = attention_spread(s.covariance);
  s.k_used = k;
  s.total_weight = sel.total_weight;
  return s;
}

/// n_sigma level set of a Gaussian with covariance `cov`.  The center is
/// left at the origin; callers place it at the attention mean.
inline Ellipse covariance_ellipse(const SymMat2& cov, double n_sigma) {
  if (!(n_sigma > 0.0) || !std::isfinite(n_sigma))
    throw ParameterError("ellipse: n_sigma must be positive");
  const SymEigen2 eig = eigen_sym2(cov);
  const double tol = 1e-9 * std::abs(cov.trace());
  if (eig.minor < -tol)
    throw InvalidCovarianceError("ellipse: covariance has a negative eigenvalue");
  Ellipse e;
  e.semi_major = n_sigma * std::sqrt(std::max(0.0, eig.major));
  e.semi_minor = n_sigma * std::sqrt(std::max(0.0, eig.minor));
  e.rotation = eig.angle;
  return e;
}

}  // namespace attnspread
