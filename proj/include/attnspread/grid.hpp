#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "attnspread/error.hpp"
#include "attnspread/linalg.hpp"

namespace attnspread {

/// Square birds-eye-view grid.  Row index p runs along y, column index q
/// along x; a cell is represented by its center.
struct GridSpec {
  int size_cells = 128;
  double min_x = -51.2;
  double min_y = -51.2;
  double cell_size = 0.8;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(size_cells) * static_cast<std::size_t>(size_cells);
  }
  double extent() const { return size_cells * cell_size; }

  void validate() const {
    if (size_cells < 1) throw ParameterError("grid: size_cells must be >= 1");
    if (!std::isfinite(min_x) || !std::isfinite(min_y) || !std::isfinite(cell_size))
      throw ParameterError("grid: non-finite field");
    if (!(cell_size > 0.0)) throw ParameterError("grid: cell_size must be > 0");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// 128 cells of 0.8 m covering [-51.2, 51.2] m on both axes, ego at the origin.
inline GridSpec default_grid() { return GridSpec{128, -51.2, -51.2, 0.8}; }

inline double cell_center_x(const GridSpec& grid, int q) {
  return grid.min_x + (q + 0.5) * grid.cell_size;
}
inline double cell_center_y(const GridSpec& grid, int p) {
  return grid.min_y + (p + 0.5) * grid.cell_size;
}

inline Vec2 cell_center(const GridSpec& grid, int p, int q) {
  if (p < 0 || q < 0 || p >= grid.size_cells || q >= grid.size_cells)
    throw OutOfBoundsError("cell (" + std::to_string(p) + ", " + std::to_string(q) +
                           ") outside grid of " + std::to_string(grid.size_cells) + " cells");
  return {cell_center_x(grid, q), cell_center_y(grid, p)};
}

struct CellIndex {
  int p = 0;
  int q = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

/// Cell containing a metric location; throws OutOfBoundsError outside the grid.
inline CellIndex cell_of(const GridSpec& grid, Vec2 location) {
  const double fq = std::floor((location.x - grid.min_x) / grid.cell_size);
  const double fp = std::floor((location.y - grid.min_y) / grid.cell_size);
  if (!(fq >= 0 && fp >= 0 && fq < grid.size_cells && fp < grid.size_cells))
    throw OutOfBoundsError("location outside grid");
  return {static_cast<int>(fp), static_cast<int>(fq)};
}

}  // namespace attnspread
