#pragma once

// Shared fixtures and small builders for the test suites.

#include <string>
#include <utility>
#include <vector>

#include "riskplan/riskplan.hpp"

namespace riskplan::fixtures {

inline OccupancyGrid grid_from(const std::string& map_text) {
  return parse_map(map_text);
}

// Model with a single constant-per-state element; state_risk(v) == unit for
// every vertex, which makes hand calculations trivial.
inline RiskModel constant_state_model(double unit, double w_states = 1.0,
                                      double w_path = 0.0) {
  RiskModel m;
  m.state_elements = {{StateElementKind::ActionLength, 1.0, 3.0, 2, unit}};
  m.path_elements.clear();
  m.w_states = w_states;
  m.w_path = w_path;
  return m;
}

inline RiskModel distance_only_model(double d_max = 3.0) {
  RiskModel m;
  m.state_elements = {{StateElementKind::DistanceToObstacle, 1.0, d_max}};
  m.path_elements.clear();
  return m;
}

// Two disjoint corridors from the same start to the same goal: route A takes
// six turns through open space (low per-state risk), route B runs straight
// between two obstacle slabs (high per-state risk). Sweeping the tortuosity
// weight trades one against the other.
struct TwoRouteFixture {
  OccupancyGrid grid;
  PlanningGraph graph;
  std::vector<VertexId> route_a;
  std::vector<VertexId> route_b;
  VertexId goal;

  static TwoRouteFixture make() {
    const std::string map_text =
        "...............\n"
        "...............\n"
        "...............\n"
        "...............\n"
        "...............\n"
        "......#####....\n"
        "......#####....\n"
        "..S............\n"
        "......#####....\n"
        "......#####....\n";
    OccupancyGrid grid = parse_map(map_text);
    const std::vector<Cell> a_cells = {
        {2, 7}, {2, 6}, {2, 5}, {2, 4},  {2, 3},  {3, 3},  {3, 2},
        {4, 2}, {5, 2}, {6, 2}, {7, 2},  {8, 2},  {9, 2},  {10, 2},
        {11, 2}, {11, 3}, {12, 3}, {12, 4}, {12, 5}, {12, 6}, {12, 7}};
    std::vector<Cell> b_cells;
    for (int x = 2; x <= 12; ++x) b_cells.push_back({x, 7, 0});
    std::vector<std::pair<Cell, Cell>> edges;
    for (std::size_t i = 1; i < a_cells.size(); ++i)
      edges.emplace_back(a_cells[i - 1], a_cells[i]);
    for (std::size_t i = 1; i < b_cells.size(); ++i)
      edges.emplace_back(b_cells[i - 1], b_cells[i]);
    PlanningGraph graph =
        PlanningGraph::with_edges(grid, Connectivity::Orthogonal, edges);
    TwoRouteFixture f{std::move(grid), std::move(graph), {}, {}, 0};
    for (const Cell& c : a_cells) f.route_a.push_back(*f.graph.vertex_at(c));
    for (const Cell& c : b_cells) f.route_b.push_back(*f.graph.vertex_at(c));
    f.goal = f.route_b.back();
    return f;
  }

  // action_length 0.2 + visibility, so clean cells evaluate to 0.1 per state;
  // tortuosity is the swept element
  static RiskModel model(double tortuosity_weight) {
    RiskModel m;
    m.state_elements = {{StateElementKind::ActionLength, 1.0, 3.0, 2, 0.2},
                        {StateElementKind::Visibility, 1.0, 3.0, 2}};
    m.path_elements = {{PathElementKind::Tortuosity, tortuosity_weight, 0.1}};
    return m;
  }
};

}  // namespace riskplan::fixtures
