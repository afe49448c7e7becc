#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskplan {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

// Direction label for "arrived with no incoming edge" (start vertex only).
inline constexpr EdgeId kNoEdge = -1;

// File-format errors. line/col are 1-based; 0 means "not tied to a location".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line = 0, int col = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) +
                                          ", col " + std::to_string(col) + ")"
                                    : msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

// Violated domain invariant (bad config value, occupied start cell, ...).
// `where` names the offending key or field, e.g. "risk.combine_weights.states".
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& msg, const std::string& where = "")
      : std::runtime_error(where.empty() ? msg : where + ": " + msg) {}
};

enum class Connectivity {
  Orthogonal,  // 4 neighbors in 2-D, 6 in 3-D
  Full,        // 8 neighbors in 2-D, 26 in 3-D
};

inline const char* to_string(Connectivity c) {
  return c == Connectivity::Orthogonal ? "orthogonal" : "full";
}

// Cell coordinates. z is always 0 on 2-D grids.
struct Cell {
  int x = 0, y = 0, z = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

inline Cell operator+(const Cell& a, const Cell& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Cell operator-(const Cell& a, const Cell& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

// N-dimensional (N = 2 or 3) boolean obstacle field with a start cell and an
// optional point of interest. Immutable after construction.
class OccupancyGrid {
 public:
  OccupancyGrid(std::vector<int> dims, std::vector<std::uint8_t> occupied,
                Cell start, std::optional<Cell> poi = std::nullopt)
      : ndim_(static_cast<int>(dims.size())), start_(start), poi_(poi) {
    if (ndim_ != 2 && ndim_ != 3)
      throw InvariantError("dims must have length 2 or 3", "grid.dims");
    for (int d : dims)
      if (d < 1) throw InvariantError("dims must be positive", "grid.dims");
    w_ = dims[0];
    h_ = dims[1];
    d_ = ndim_ == 3 ? dims[2] : 1;
    if (occupied.size() != static_cast<std::size_t>(num_cells()))
      throw InvariantError("occupancy size does not match dims", "grid");
    occupied_ = std::move(occupied);
    if (!in_bounds(start_))
      throw InvariantError("start cell out of bounds", "grid.start");
    if (occupied_[cell_index(start_)])
      throw InvariantError("start cell is occupied", "grid.start");
    if (poi_ && !in_bounds(*poi_))
      throw InvariantError("poi cell out of bounds", "grid.poi");
  }

  static OccupancyGrid empty(std::vector<int> dims, Cell start,
                             std::optional<Cell> poi = std::nullopt) {
    int n = 1;
    for (int d : dims) n *= d;
    return OccupancyGrid(std::move(dims), std::vector<std::uint8_t>(n, 0),
                         start, poi);
  }

  static OccupancyGrid from_cells(std::vector<int> dims,
                                  const std::vector<Cell>& obstacles,
                                  Cell start,
                                  std::optional<Cell> poi = std::nullopt) {
    int n = 1;
    for (int d : dims) n *= d;
    std::vector<std::uint8_t> occ(n, 0);
    const int w = dims[0];
    const int h = dims.size() > 1 ? dims[1] : 1;
    for (const Cell& c : obstacles)
      occ[(static_cast<std::size_t>(c.z) * h + c.y) * w + c.x] = 1;
    return OccupancyGrid(std::move(dims), std::move(occ), start, poi);
  }

  int ndim() const { return ndim_; }
  int width() const { return w_; }
  int height() const { return h_; }
  int depth() const { return d_; }
  int num_cells() const { return w_ * h_ * d_; }

  std::vector<int> dims() const {
    if (ndim_ == 2) return {w_, h_};
    return {w_, h_, d_};
  }

  bool in_bounds(const Cell& c) const {
    return c.x >= 0 && c.x < w_ && c.y >= 0 && c.y < h_ && c.z >= 0 &&
           c.z < d_;
  }

  // Row-major within a plane, plane-major across z.
  int cell_index(const Cell& c) const { return (c.z * h_ + c.y) * w_ + c.x; }

  Cell index_cell(int i) const {
    return {i % w_, (i / w_) % h_, i / (w_ * h_)};
  }

  bool occupied(const Cell& c) const { return occupied_[cell_index(c)] != 0; }
  bool occupied(int index) const { return occupied_[index] != 0; }

  const Cell& start() const { return start_; }
  const std::optional<Cell>& poi() const { return poi_; }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.ndim_ == b.ndim_ && a.w_ == b.w_ && a.h_ == b.h_ &&
           a.d_ == b.d_ && a.occupied_ == b.occupied_ && a.start_ == b.start_ &&
           a.poi_ == b.poi_;
  }

 private:
  int ndim_;
  int w_ = 0, h_ = 0, d_ = 1;
  std::vector<std::uint8_t> occupied_;
  Cell start_;
  std::optional<Cell> poi_;
};

// Neighbor offsets for a connectivity, ordered by linear cell-index delta so
// that traversals over them are deterministic.
inline std::vector<Cell> neighbor_offsets(int ndim, Connectivity conn) {
  std::vector<Cell> out;
  const int zlo = ndim == 3 ? -1 : 0;
  const int zhi = ndim == 3 ? 1 : 0;
  for (int dz = zlo; dz <= zhi; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
        if (conn == Connectivity::Orthogonal && nonzero != 1) continue;
        out.push_back({dx, dy, dz});
      }
  return out;
}

}  // namespace riskplan
