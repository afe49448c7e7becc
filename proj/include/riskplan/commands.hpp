#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>

#include "riskplan/instance_gen.hpp"
#include "riskplan/io.hpp"
#include "riskplan/oracles.hpp"
#include "riskplan/render.hpp"

namespace riskplan {

// Command implementations behind the CLI binary. They work on in-memory text
// so tests can drive them directly and compare outputs byte for byte.

struct RewardsSpec {
  enum class Kind { Synth, Csv } kind = Kind::Synth;
  std::string csv_text;
};

struct PlanOutputs {
  std::string result_json;
  std::optional<std::string> svg;
  bool truncated = false;
};

namespace cmd_detail {

inline RewardMap resolve_rewards(const RewardsSpec& spec,
                                 const OccupancyGrid& grid,
                                 const PlanningGraph& graph, double gamma) {
  if (spec.kind == RewardsSpec::Kind::Csv)
    return parse_rewards_csv(spec.csv_text, grid, graph, gamma);
  if (!grid.poi())
    throw InvariantError(
        "synthetic rewards need a point of interest ('P') in the map",
        "rewards");
  return synth_reward_map(grid, graph, *grid.poi(), {}, gamma);
}

inline std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace cmd_detail

inline PlanOutputs cmd_plan(const std::string& map_text,
                            const std::string& config_text,
                            const RewardsSpec& rewards_spec, PlanMode mode,
                            std::optional<double> gamma_override = std::nullopt,
                            bool with_svg = false, int layer = -1) {
  Config cfg = parse_config(config_text);
  if (gamma_override) {
    if (!(*gamma_override >= 0.0 && *gamma_override <= 1.0))
      throw InvariantError("gamma must lie in [0, 1]", "gamma");
    cfg.gamma = *gamma_override;
  }
  const OccupancyGrid grid = parse_map(map_text);
  const PlanningGraph graph = PlanningGraph::from_grid(grid, cfg.connectivity);
  const RewardMap rewards =
      cmd_detail::resolve_rewards(rewards_spec, grid, graph, cfg.gamma);
  validate(rewards, graph);

  const PlanResult result =
      plan(graph, grid, rewards, cfg.model, mode, cfg.limits);
  const ResultDoc doc = make_result_doc(mode, result, graph, rewards, cfg);
  PlanOutputs out;
  out.result_json = serialize_result(doc, grid.ndim());
  out.truncated = result.stats.truncated;
  verify_result(parse_result(out.result_json), grid);

  if (with_svg) {
    RenderPath rp{to_string(result.planner), {}};
    for (VertexId v : result.path.vertices())
      rp.cells.push_back(graph.cell_of(v));
    const std::vector<RenderPath> paths{rp};
    out.svg = render_svg(grid, &graph, &rewards, paths, layer);
  }
  return out;
}

struct CountOutputs {
  std::string report;  // deterministic; timing is reported separately
  bool truncated = false;
  double elapsed_seconds = 0.0;
};

inline CountOutputs cmd_count(const std::string& map_text,
                              const std::string& config_text) {
  const Config cfg = parse_config(config_text);
  const OccupancyGrid grid = parse_map(map_text);
  const PlanningGraph graph = PlanningGraph::from_grid(grid, cfg.connectivity);
  const auto t0 = std::chrono::steady_clock::now();
  const CountResult count =
      count_simple_paths(graph, graph.start(), cfg.limits.max_paths);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  CountOutputs out;
  out.truncated = count.truncated;
  out.elapsed_seconds = dt.count();
  out.report = "simple_paths_from_start: " + std::to_string(count.count) +
               "\ntruncated: " + (count.truncated ? "true" : "false") + "\n";
  return out;
}

// Seeded randomized benchmark: per trial, the exact enumerator and the
// two-stage planner run on the same instance, the utility gap is recorded,
// and the directional search's per-vertex risks are checked against the
// enumeration oracle. Everything except the *_ms columns is reproducible
// from the seed in the header.
struct BenchSpec {
  int trials = 50;
  std::uint64_t seed = 1;
  RandomInstanceSpec instances;
};

inline std::string cmd_bench(const BenchSpec& spec) {
  using cmd_detail::fmt;
  std::string csv =
      "# riskplan bench seed=" + std::to_string(spec.seed) +
      " trials=" + std::to_string(spec.trials) +
      " width=" + std::to_string(spec.instances.min_width) + ".." +
      std::to_string(spec.instances.max_width) +
      " height=" + std::to_string(spec.instances.min_height) + ".." +
      std::to_string(spec.instances.max_height) +
      " density=" + fmt(spec.instances.obstacle_density) + "\n";
  csv +=
      "trial,width,height,connectivity,vertices,edges,gamma,"
      "exact_value,exact_reward,exact_risk,exact_path_len,exact_paths,"
      "exact_truncated,exact_states_risk,exact_path_component,"
      "approx_value,approx_reward,approx_risk,approx_path_len,"
      "approx_states_risk,approx_path_component,"
      "utility_gap,ensemble_max_gap,exact_ms,approx_ms\n";

  std::mt19937 rng(static_cast<std::uint32_t>(spec.seed));
  for (int trial = 0; trial < spec.trials; ++trial) {
    const RandomInstance inst = make_random_instance(rng, spec.instances);
    const RiskEvaluator eval(inst.model, inst.graph, inst.grid);

    const auto t0 = std::chrono::steady_clock::now();
    const PlanResult exact = exact_enumerate(inst.graph, inst.rewards, eval);
    const auto t1 = std::chrono::steady_clock::now();
    const MinRiskEnsemble ensemble = risk_aware_dijkstra(inst.graph, eval);
    const PlanResult approx =
        max_utility_select(ensemble, inst.graph, inst.rewards, eval);
    const auto t2 = std::chrono::steady_clock::now();

    double ensemble_gap = 0.0;
    const auto oracle = min_risk_all(inst.graph, eval);
    for (VertexId v = 0; v < inst.graph.num_vertices(); ++v) {
      const bool a = ensemble.per_vertex[v].has_value();
      const bool b = oracle[v].has_value();
      if (a != b) {
        ensemble_gap = std::numeric_limits<double>::infinity();
        break;
      }
      if (a)
        ensemble_gap = std::max(
            ensemble_gap, std::abs(ensemble.per_vertex[v]->risk - oracle[v]->risk));
    }

    const std::chrono::duration<double, std::milli> exact_ms = t1 - t0;
    const std::chrono::duration<double, std::milli> approx_ms = t2 - t1;
    csv += std::to_string(trial) + "," + std::to_string(inst.grid.width()) +
           "," + std::to_string(inst.grid.height()) + "," +
           to_string(inst.graph.connectivity()) + "," +
           std::to_string(inst.graph.num_vertices()) + "," +
           std::to_string(inst.graph.num_edges()) + "," +
           fmt(inst.rewards.gamma) + "," + fmt(exact.utility.value) + "," +
           fmt(exact.utility.reward) + "," + fmt(exact.utility.risk) + "," +
           std::to_string(exact.path.num_vertices()) + "," +
           std::to_string(exact.stats.paths_enumerated) + "," +
           (exact.stats.truncated ? "true" : "false") + "," +
           fmt(exact.breakdown.integrated_states_risk) + "," +
           fmt(exact.breakdown.path_risk_component) + "," +
           fmt(approx.utility.value) + "," + fmt(approx.utility.reward) + "," +
           fmt(approx.utility.risk) + "," +
           std::to_string(approx.path.num_vertices()) + "," +
           fmt(approx.breakdown.integrated_states_risk) + "," +
           fmt(approx.breakdown.path_risk_component) + "," +
           fmt(exact.utility.value - approx.utility.value) + "," +
           fmt(ensemble_gap) + "," + fmt(exact_ms.count(), "%.3f") + "," +
           fmt(approx_ms.count(), "%.3f") + "\n";
  }
  return csv;
}

inline std::string cmd_render(const std::string& map_text,
                              const std::string& config_text,
                              const std::optional<RewardsSpec>& rewards_spec,
                              int layer = -1) {
  const Config cfg = parse_config(config_text);
  const OccupancyGrid grid = parse_map(map_text);
  const PlanningGraph graph = PlanningGraph::from_grid(grid, cfg.connectivity);
  std::optional<RewardMap> rewards;
  if (rewards_spec)
    rewards = cmd_detail::resolve_rewards(*rewards_spec, grid, graph, cfg.gamma);
  return render_svg(grid, &graph, rewards ? &*rewards : nullptr, {}, layer);
}

// Documented example: why a shortest-walk formulation breaks down. Rewards
// accumulated along a walk keep growing while per-state risk grows slowly, so
// differencing inverse utilities along a walk that shuttles between two cells
// produces a negative-total cycle, and relaxation-based search would descend
// it forever. The planner's simple-path constraint is what rules this out.
inline std::string demo_negative_cycle() {
  using cmd_detail::fmt;

  const OccupancyGrid grid = parse_map("S..\n");
  const PlanningGraph graph =
      PlanningGraph::from_grid(grid, Connectivity::Orthogonal);
  RiskModel model;
  model.state_elements = {{StateElementKind::ActionLength, 1.0, 3.0, 2, 0.05}};
  model.w_states = 1.0;
  model.w_path = 0.0;
  const RiskEvaluator eval(model, graph, grid);
  RewardMap rewards;
  rewards.gamma = 1.0;
  rewards.reward = {0.5, 0.9, 0.9};

  const VertexId a = 0, b = 1, c = 2;
  const std::vector<std::vector<VertexId>> walks = {
      {a, b}, {a, b, c}, {a, b, c, b}, {a, b, c, b, c}};

  const auto cell_str = [&](VertexId v) {
    const Cell& cc = graph.cell_of(v);
    return "(" + std::to_string(cc.x) + "," + std::to_string(cc.y) + ")";
  };

  std::string out;
  out += "negative-cycle demonstration\n";
  out += "map: 3x1 corridor, all free, start at (0,0)\n";
  out += "model: action_length state element only, 0.05 per state\n";
  out += "rewards: (0,0)=0.5 (1,0)=0.9 (2,0)=0.9, gamma=1\n\n";
  out += "walk prefixes (simple-path constraint deliberately dropped):\n";

  std::vector<PrefixUtility> chain;
  for (const auto& walk : walks) {
    const double reward = accumulate_reward(walk, rewards);
    const double risk = eval.evaluate_total(walk);
    chain.push_back({walk, risk / reward});
    std::string label;
    for (VertexId v : walk) {
      if (!label.empty()) label += "->";
      label += cell_str(v);
    }
    out += "  " + label + "  reward=" + fmt(reward, "%.9f") +
           " risk=" + fmt(risk, "%.9f") +
           " inverse_utility=" + fmt(risk / reward, "%.9f") + "\n";
  }

  const WeightedDigraph digraph =
      utility_to_edge_weights(chain, graph.num_vertices());
  out += "\nedge weights (inverse-utility differences):\n";
  for (const auto& arc : digraph.arcs)
    out += "  " + cell_str(arc.from) + "->" + cell_str(arc.to) + "  " +
           fmt(arc.weight, "%+.9f") + "\n";

  const auto cycle = find_negative_cycle(digraph);
  if (!cycle) {
    out += "\nno negative cycle found (unexpected)\n";
    return out;
  }
  out += "\nnegative cycle: ";
  for (VertexId v : cycle->cycle) out += cell_str(v) + " -> ";
  out += cell_str(cycle->cycle.front());
  out += "  total weight = " + fmt(cycle->total_weight, "%.9f") + "\n";
  out +=
      "a relaxation-based search would loop this cycle forever; candidate\n"
      "paths must therefore stay simple\n";
  return out;
}

}  // namespace riskplan
