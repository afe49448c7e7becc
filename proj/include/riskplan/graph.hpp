#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "riskplan/core.hpp"

namespace riskplan {

struct Edge {
  VertexId u, v;  // u < v

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Adjacent {
  VertexId vertex;
  EdgeId edge;
};

// Undirected graph over the free cells of an occupancy grid. Vertex ids are
// assigned row-major (plane-major in 3-D) over free cells, so identical grids
// always produce identical numbering. Immutable after construction.
class PlanningGraph {
 public:
  // One vertex per free cell, one edge per free neighbor pair under the
  // connectivity. Diagonal steps are added only when every axis-aligned
  // sub-step of the move lands on a free cell, so a path can never cut a
  // corner through an obstacle.
  static PlanningGraph from_grid(const OccupancyGrid& grid, Connectivity conn) {
    PlanningGraph g(grid, conn);
    const auto offsets = neighbor_offsets(grid.ndim(), conn);
    for (VertexId u = 0; u < g.num_vertices(); ++u) {
      const Cell a = g.cells_[u];
      std::vector<VertexId> nbrs;
      for (const Cell& d : offsets) {
        const Cell b = a + d;
        if (!grid.in_bounds(b) || grid.occupied(b)) continue;
        if (!corner_free(grid, a, d)) continue;
        const VertexId v = g.vertex_of_cell_[grid.cell_index(b)];
        if (v > u) nbrs.push_back(v);
      }
      std::sort(nbrs.begin(), nbrs.end());
      for (VertexId v : nbrs) g.edges_.push_back({u, v});
    }
    g.build_adjacency();
    return g;
  }

  // Same vertex numbering, but only the caller-supplied edges. Each pair must
  // join two distinct free cells that are neighbors under the connectivity.
  // Used for hand-built fixtures where only selected corridors exist.
  static PlanningGraph with_edges(const OccupancyGrid& grid, Connectivity conn,
                                  const std::vector<std::pair<Cell, Cell>>& edges) {
    PlanningGraph g(grid, conn);
    for (const auto& [ca, cb] : edges) {
      if (!grid.in_bounds(ca) || !grid.in_bounds(cb))
        throw InvariantError("edge endpoint out of bounds", "graph.edges");
      if (grid.occupied(ca) || grid.occupied(cb))
        throw InvariantError("edge endpoint on occupied cell", "graph.edges");
      const Cell d = cb - ca;
      const int cheb = std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)});
      const int nonzero = (d.x != 0) + (d.y != 0) + (d.z != 0);
      if (cheb != 1 || (conn == Connectivity::Orthogonal && nonzero != 1))
        throw InvariantError("edge endpoints are not neighbors", "graph.edges");
      VertexId u = g.vertex_of_cell_[grid.cell_index(ca)];
      VertexId v = g.vertex_of_cell_[grid.cell_index(cb)];
      if (u > v) std::swap(u, v);
      g.edges_.push_back({u, v});
    }
    std::sort(g.edges_.begin(), g.edges_.end(),
              [](const Edge& a, const Edge& b) {
                return a.u != b.u ? a.u < b.u : a.v < b.v;
              });
    for (std::size_t i = 1; i < g.edges_.size(); ++i)
      if (g.edges_[i] == g.edges_[i - 1])
        throw InvariantError("duplicate edge", "graph.edges");
    g.build_adjacency();
    return g;
  }

  int num_vertices() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  VertexId start() const { return v_start_; }
  Connectivity connectivity() const { return conn_; }

  const Cell& cell_of(VertexId v) const {
    check_vertex(v);
    return cells_[v];
  }

  std::optional<VertexId> vertex_at(const Cell& c) const {
    if (c.x < 0 || c.y < 0 || c.z < 0) return std::nullopt;
    const std::size_t i = static_cast<std::size_t>(c.z) * grid_h_ * grid_w_ +
                          static_cast<std::size_t>(c.y) * grid_w_ + c.x;
    if (c.x >= grid_w_ || c.y >= grid_h_ || i >= vertex_of_cell_.size())
      return std::nullopt;
    const VertexId v = vertex_of_cell_[i];
    return v >= 0 ? std::optional<VertexId>(v) : std::nullopt;
  }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  // Adjacent vertices with their connecting edge id, ascending by vertex id.
  std::span<const Adjacent> neighbors(VertexId v) const {
    check_vertex(v);
    return {adj_.data() + adj_offset_[v],
            static_cast<std::size_t>(adj_offset_[v + 1] - adj_offset_[v])};
  }

  int degree(VertexId v) const {
    check_vertex(v);
    return adj_offset_[v + 1] - adj_offset_[v];
  }

 private:
  PlanningGraph(const OccupancyGrid& grid, Connectivity conn)
      : conn_(conn), grid_w_(grid.width()), grid_h_(grid.height()) {
    vertex_of_cell_.assign(grid.num_cells(), -1);
    for (int i = 0; i < grid.num_cells(); ++i) {
      if (grid.occupied(i)) continue;
      vertex_of_cell_[i] = static_cast<VertexId>(cells_.size());
      cells_.push_back(grid.index_cell(i));
    }
    v_start_ = vertex_of_cell_[grid.cell_index(grid.start())];
  }

  // A diagonal move is allowed only if every cell reached by zeroing some of
  // the move's axis components is free; the k = 1 (orthogonal) case has no
  // such cells.
  static bool corner_free(const OccupancyGrid& grid, const Cell& a,
                          const Cell& d) {
    const int axes[3] = {d.x, d.y, d.z};
    int nz[3], k = 0;
    for (int i = 0; i < 3; ++i)
      if (axes[i] != 0) nz[k++] = i;
    if (k <= 1) return true;
    for (int mask = 1; mask < (1 << k) - 1; ++mask) {
      Cell m = a;
      for (int b = 0; b < k; ++b) {
        if (!(mask & (1 << b))) continue;
        if (nz[b] == 0) m.x += d.x;
        if (nz[b] == 1) m.y += d.y;
        if (nz[b] == 2) m.z += d.z;
      }
      if (!grid.in_bounds(m) || grid.occupied(m)) return false;
    }
    return true;
  }

  void build_adjacency() {
    adj_offset_.assign(num_vertices() + 1, 0);
    for (const Edge& e : edges_) {
      ++adj_offset_[e.u + 1];
      ++adj_offset_[e.v + 1];
    }
    for (int v = 0; v < num_vertices(); ++v)
      adj_offset_[v + 1] += adj_offset_[v];
    adj_.resize(edges_.size() * 2);
    std::vector<int> fill(adj_offset_.begin(), adj_offset_.end() - 1);
    for (EdgeId e = 0; e < num_edges(); ++e) {
      adj_[fill[edges_[e].u]++] = {edges_[e].v, e};
      adj_[fill[edges_[e].v]++] = {edges_[e].u, e};
    }
    for (int v = 0; v < num_vertices(); ++v)
      std::sort(adj_.begin() + adj_offset_[v], adj_.begin() + adj_offset_[v + 1],
                [](const Adjacent& a, const Adjacent& b) {
                  return a.vertex < b.vertex;
                });
  }

  void check_vertex(VertexId v) const {
    if (v < 0 || v >= num_vertices())
      throw InvariantError("unknown vertex id " + std::to_string(v), "graph");
  }

  Connectivity conn_;
  int grid_w_, grid_h_;
  std::vector<Cell> cells_;
  std::vector<VertexId> vertex_of_cell_;
  VertexId v_start_ = -1;
  std::vector<Edge> edges_;
  std::vector<Adjacent> adj_;
  std::vector<int> adj_offset_;
};

// Simple (no vertex repeats), edge-connected vertex sequence. Only the
// validating constructors below can produce one, so a Path is valid by
// construction.
class Path {
 public:
  explicit Path(VertexId origin) : verts_{origin} {}

  static Path from_vertices(const PlanningGraph& g,
                            std::vector<VertexId> verts) {
    if (verts.empty()) throw InvariantError("path must be non-empty", "path");
    for (std::size_t i = 0; i < verts.size(); ++i) {
      g.cell_of(verts[i]);  // bounds check
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        if (verts[i] == verts[j])
          throw InvariantError("path revisits a vertex", "path");
    }
    for (std::size_t i = 1; i < verts.size(); ++i) {
      const auto nbrs = g.neighbors(verts[i - 1]);
      const bool adj = std::any_of(nbrs.begin(), nbrs.end(), [&](const Adjacent& a) {
        return a.vertex == verts[i];
      });
      if (!adj)
        throw InvariantError("consecutive path vertices are not adjacent",
                             "path");
    }
    Path p(verts[0]);
    p.verts_ = std::move(verts);
    return p;
  }

  const std::vector<VertexId>& vertices() const { return verts_; }
  VertexId origin() const { return verts_.front(); }
  VertexId back() const { return verts_.back(); }
  int num_vertices() const { return static_cast<int>(verts_.size()); }
  int num_edges() const { return static_cast<int>(verts_.size()) - 1; }

  bool contains(VertexId v) const {
    return std::find(verts_.begin(), verts_.end(), v) != verts_.end();
  }

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<VertexId> verts_;
};

enum class ExtendReject { NotAdjacent, Revisit };

struct ExtendOutcome {
  std::optional<Path> path;  // engaged on success
  ExtendReject reject = ExtendReject::NotAdjacent;

  explicit operator bool() const { return path.has_value(); }
};

// Appends v to the path if v is adjacent to the path's last vertex and not
// already visited. Rejection is a normal outcome, not an error.
inline ExtendOutcome extend(const Path& p, VertexId v, const PlanningGraph& g) {
  if (p.contains(v)) return {std::nullopt, ExtendReject::Revisit};
  const auto nbrs = g.neighbors(p.back());
  const bool adj = std::any_of(nbrs.begin(), nbrs.end(),
                               [&](const Adjacent& a) { return a.vertex == v; });
  if (!adj) return {std::nullopt, ExtendReject::NotAdjacent};
  std::vector<VertexId> verts = p.vertices();
  verts.push_back(v);
  return {Path::from_vertices(g, std::move(verts)), ExtendReject::NotAdjacent};
}

// A (vertex, incoming edge) pair. incoming_edge == kNoEdge marks the start
// vertex's synthetic "arrived from nowhere" direction.
struct Direction {
  VertexId vertex;
  EdgeId incoming_edge;

  friend bool operator==(const Direction&, const Direction&) = default;
};

// All directions of v: one per incident edge (ascending edge id), plus the
// kNoEdge direction when v is the graph's start vertex.
inline std::vector<Direction> directions_of(const PlanningGraph& g, VertexId v) {
  std::vector<Direction> out;
  if (v == g.start()) out.push_back({v, kNoEdge});
  std::vector<EdgeId> ids;
  for (const Adjacent& a : g.neighbors(v)) ids.push_back(a.edge);
  std::sort(ids.begin(), ids.end());
  for (EdgeId e : ids) out.push_back({v, e});
  return out;
}

}  // namespace riskplan
