#pragma once

#include <random>

#include "riskplan/reward.hpp"

namespace riskplan {

// Seeded random planning instances for the benchmark harness and the
// randomized comparison suites. Grids stay small enough that exhaustive
// enumeration remains feasible, and the fixed element parameters keep the
// tortuosity/length unit caps from saturating at these path lengths, so the
// generated models stay inside the direction-Markov class the directional
// search is exact on.
struct RandomInstanceSpec {
  int min_width = 2, max_width = 4;
  int min_height = 2, max_height = 4;
  double obstacle_density = 0.25;
  bool randomize_connectivity = true;
  Connectivity connectivity = Connectivity::Orthogonal;
};

struct RandomInstance {
  OccupancyGrid grid;
  PlanningGraph graph;
  RiskModel model;
  RewardMap rewards;
};

namespace gen_detail {

inline double uniform01(std::mt19937& rng) {
  return static_cast<double>(rng()) / 4294967296.0;
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1));
}

// 0 with probability 1/4, else uniform in [0.1, 1.5]; zero-or-clearly-positive
// weights keep totals away from the risk floor except in the all-zero case
inline double element_weight(std::mt19937& rng) {
  if (uniform01(rng) < 0.25) return 0.0;
  return 0.1 + 1.4 * uniform01(rng);
}

}  // namespace gen_detail

inline RandomInstance make_random_instance(std::mt19937& rng,
                                           const RandomInstanceSpec& spec = {}) {
  using gen_detail::element_weight;
  using gen_detail::uniform01;
  using gen_detail::uniform_int;

  const int w = uniform_int(rng, spec.min_width, spec.max_width);
  const int h = uniform_int(rng, spec.min_height, spec.max_height);
  const Connectivity conn =
      spec.randomize_connectivity
          ? (uniform01(rng) < 0.5 ? Connectivity::Orthogonal
                                  : Connectivity::Full)
          : spec.connectivity;
  const Cell start{uniform_int(rng, 0, w - 1), uniform_int(rng, 0, h - 1), 0};

  std::optional<OccupancyGrid> grid;
  std::optional<PlanningGraph> graph;
  for (int attempt = 0; attempt < 32; ++attempt) {
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(w) * h, 0);
    for (int i = 0; i < w * h; ++i)
      if (uniform01(rng) < spec.obstacle_density) occ[i] = 1;
    occ[start.y * w + start.x] = 0;
    grid = OccupancyGrid({w, h}, std::move(occ), start);
    graph = PlanningGraph::from_grid(*grid, conn);
    if (graph->num_vertices() == 1 || graph->degree(graph->start()) > 0) break;
  }

  RiskModel model;
  model.state_elements = {
      {StateElementKind::DistanceToObstacle, element_weight(rng), 3.0},
      {StateElementKind::Visibility, element_weight(rng), 3.0, 2},
      {StateElementKind::ActionLength, element_weight(rng), 3.0, 2, 0.05},
  };
  model.path_elements = {
      {PathElementKind::Tortuosity, element_weight(rng), 0.05},
      {PathElementKind::PathLength, element_weight(rng), 0.05, 0.05},
  };
  model.w_states = 0.1 + 1.4 * uniform01(rng);
  model.w_path = 0.1 + 1.4 * uniform01(rng);
  model.risk_floor = 1e-6;

  RewardMap rewards;
  rewards.gamma = 0.5 + 0.5 * uniform01(rng);
  rewards.reward.resize(graph->num_vertices());
  for (double& r : rewards.reward) r = uniform01(rng);

  return {std::move(*grid), std::move(*graph), std::move(model),
          std::move(rewards)};
}

}  // namespace riskplan
