#pragma once

#include <cmath>

namespace attnspread {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct SymMat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  constexpr double trace() const { return xx + yy; }
  constexpr double det() const { return xx * yy - xy * xy; }
  friend constexpr bool operator==(const SymMat2&, const SymMat2&) = default;
};

/// Eigenvalues (descending) of a symmetric 2x2 matrix, closed form.
struct SymEigen2 {
  double major = 0.0;
  double minor = 0.0;
  /// Orientation of the major eigenvector in (-pi/2, pi/2].
  double angle = 0.0;
};

inline SymEigen2 eigen_sym2(const SymMat2& m) {
  const double half_trace = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double radius = std::hypot(half_diff, m.xy);
  double angle = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy);
  // atan2 yields (-pi, pi], so angle is already in (-pi/2, pi/2].
  if (angle <= -M_PI / 2) angle += M_PI;
  return {half_trace + radius, half_trace - radius, angle};
}

}  // namespace attnspread
