#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace riskplan {
namespace {

using fixtures::constant_state_model;
using fixtures::grid_from;
using fixtures::TwoRouteFixture;

struct Env {
  OccupancyGrid grid;
  PlanningGraph graph;

  explicit Env(const std::string& map,
               Connectivity conn = Connectivity::Orthogonal)
      : grid(parse_map(map)), graph(PlanningGraph::from_grid(grid, conn)) {}
};

RewardMap uniform_rewards(const PlanningGraph& g, double value,
                          double gamma = 1.0) {
  RewardMap r;
  r.gamma = gamma;
  r.reward.assign(g.num_vertices(), value);
  return r;
}

TEST(ExactEnumerate, CountsAllSimplePathsOn2x2) {
  Env env("S.\n..\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  const auto result =
      exact_enumerate(env.graph, uniform_rewards(env.graph, 0.5), eval);
  // corner of the 4-cycle: 2 one-edge, 2 two-edge, 2 three-edge paths
  EXPECT_EQ(result.stats.paths_enumerated, 6u);
  EXPECT_FALSE(result.stats.truncated);
}

TEST(ExactEnumerate, SingleVertexStays) {
  Env env("S\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  const auto result =
      exact_enumerate(env.graph, uniform_rewards(env.graph, 0.7), eval);
  EXPECT_EQ(result.planner, PlannerKind::Stay);
  EXPECT_EQ(result.path.num_vertices(), 1);
  EXPECT_EQ(result.stats.paths_enumerated, 0u);
  EXPECT_FALSE(result.stats.truncated);
}

TEST(ExactEnumerate, ZeroCapTruncatesToStay) {
  Env env("S.\n..\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  EnumerationLimits limits;
  limits.max_paths = 0;
  const auto result = exact_enumerate(env.graph,
                                      uniform_rewards(env.graph, 0.5), eval,
                                      limits);
  EXPECT_TRUE(result.stats.truncated);
  EXPECT_EQ(result.planner, PlannerKind::Stay);
  EXPECT_EQ(result.stats.paths_enumerated, 0u);
}

TEST(ExactEnumerate, PrefersHigherUtilityPath) {
  // rewards rise along the corridor; with gamma 1 the full corridor wins
  Env env("S...\n");
  const RiskEvaluator eval(constant_state_model(0.05), env.graph, env.grid);
  RewardMap r{{0.0, 0.1, 0.9, 0.9}, 1.0};
  const auto result = exact_enumerate(env.graph, r, eval);
  EXPECT_EQ(result.planner, PlannerKind::Exact);
  EXPECT_EQ(result.path.num_vertices(), 4);
  EXPECT_NEAR(result.utility.reward, 1.9, 1e-12);
  EXPECT_NEAR(result.utility.risk, 0.2, 1e-12);
}

TEST(ExactEnumerate, UtilityMatchesFullReevaluation) {
  Env env("S...\n....\n.#..\n");
  const RiskEvaluator eval(default_risk_model(), env.graph, env.grid);
  std::mt19937 rng(17);
  RewardMap r;
  r.gamma = 0.7;
  r.reward.resize(env.graph.num_vertices());
  for (auto& x : r.reward) x = (rng() % 1000) / 1000.0;
  const auto result = exact_enumerate(env.graph, r, eval);
  // the incrementally maintained score must equal a from-scratch evaluation
  EXPECT_DOUBLE_EQ(result.utility.risk, eval.path_risk(result.path).total);
  const double reward = result.planner == PlannerKind::Stay
                            ? stay_reward(env.graph.start(), r)
                            : accumulate_reward(result.path, r);
  EXPECT_DOUBLE_EQ(result.utility.reward, reward);
  EXPECT_DOUBLE_EQ(result.utility.value,
                   result.utility.reward / result.utility.risk);
}

TEST(RiskAwareDijkstra, UniqueCorridorPath) {
  Env env("S....\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  const VertexId far_end = *env.graph.vertex_at({4, 0});
  ASSERT_TRUE(ensemble.per_vertex[far_end].has_value());
  const auto& entry = *ensemble.per_vertex[far_end];
  EXPECT_EQ(entry.path.vertices(), (std::vector<VertexId>{0, 1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(entry.risk, eval.path_risk(entry.path).total);
}

TEST(RiskAwareDijkstra, StartAndUnreachableAbsent) {
  Env env("S.#.\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  EXPECT_FALSE(ensemble.per_vertex[env.graph.start()].has_value());
  EXPECT_FALSE(ensemble.per_vertex[*env.graph.vertex_at({3, 0})].has_value());
  EXPECT_TRUE(ensemble.per_vertex[*env.graph.vertex_at({1, 0})].has_value());
}

TEST(RiskAwareDijkstra, LengthOnlyModelMatchesBreadthFirstDistance) {
  // all-zero state risk and a pure per-step element: ensemble risk to v is
  // steps(v) * risk_per_step * w_path
  Env env("S....\n.....\n.....\n");
  RiskModel m = constant_state_model(0.0);
  m.path_elements = {{PathElementKind::PathLength, 1.0, 0.05, 0.05}};
  m.w_states = 1.0;
  m.w_path = 1.0;
  const RiskEvaluator eval(m, env.graph, env.grid);
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  for (VertexId v = 0; v < env.graph.num_vertices(); ++v) {
    if (v == env.graph.start()) continue;
    const Cell c = env.graph.cell_of(v);
    const int bfs_steps = std::abs(c.x) + std::abs(c.y);  // empty grid
    ASSERT_TRUE(ensemble.per_vertex[v].has_value());
    EXPECT_NEAR(ensemble.per_vertex[v]->risk, bfs_steps * 0.05, 1e-12);
  }
}

TEST(RiskAwareDijkstra, EnsembleEntriesReevaluateExactly) {
  Env env("S...\n.#..\n....\n");
  const RiskEvaluator eval(default_risk_model(), env.graph, env.grid);
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  for (const auto& entry : ensemble.per_vertex) {
    if (!entry) continue;
    EXPECT_DOUBLE_EQ(entry->risk, eval.path_risk(entry->path).total);
    EXPECT_EQ(entry->path.origin(), env.graph.start());
  }
}

TEST(RiskAwareDijkstra, RejectsModelsThatCouldDecreaseRisk) {
  // every shipped element is monotone, so the only route to a decreasing
  // model is an invalid parameter; construction must reject it before the
  // search can run on it
  Env env("S....\n.....\n");
  RiskModel bad = constant_state_model(0.0);
  bad.path_elements = {{PathElementKind::PathLength, 1.0, 0.05, -0.05}};
  bad.w_path = 1.0;
  EXPECT_THROW(RiskEvaluator(bad, env.graph, env.grid), InvariantError);
  bad.path_elements[0].risk_per_step = 0.05;
  bad.path_elements[0].weight = -1.0;
  EXPECT_THROW(RiskEvaluator(bad, env.graph, env.grid), InvariantError);
}

TEST(TwoRoute, TortuosityWeightFlipsWinner) {
  auto f = TwoRouteFixture::make();
  // low tortuosity weight: the six-turn low-state-risk route wins
  {
    const RiskEvaluator eval(TwoRouteFixture::model(0.0), f.graph, f.grid);
    const auto ensemble = risk_aware_dijkstra(f.graph, eval);
    ASSERT_TRUE(ensemble.per_vertex[f.goal].has_value());
    EXPECT_EQ(ensemble.per_vertex[f.goal]->path.vertices(), f.route_a);
  }
  // dominant tortuosity weight: the straight risky-state route wins
  {
    const RiskEvaluator eval(TwoRouteFixture::model(2.0), f.graph, f.grid);
    const auto ensemble = risk_aware_dijkstra(f.graph, eval);
    ASSERT_TRUE(ensemble.per_vertex[f.goal].has_value());
    EXPECT_EQ(ensemble.per_vertex[f.goal]->path.vertices(), f.route_b);
  }
}

TEST(TwoRoute, RouteShapesAreAsConstructed) {
  auto f = TwoRouteFixture::make();
  EXPECT_EQ(turns_of(f.route_a, f.graph), 6);
  EXPECT_EQ(turns_of(f.route_b, f.graph), 0);
  const RiskEvaluator eval(TwoRouteFixture::model(0.0), f.graph, f.grid);
  // clean route-A cells calibrate to 0.1 per state
  EXPECT_DOUBLE_EQ(eval.state_risk(f.route_a[0]), 0.1);
  EXPECT_DOUBLE_EQ(eval.state_risk(f.route_a[7]), 0.1);
  // route B's mid-corridor states are several times riskier
  EXPECT_GT(eval.state_risk(f.route_b[6]), 0.4);
}

TEST(MaxUtilitySelect, AllZeroRewardsStay) {
  Env env("S...\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  const auto result = max_utility_select(ensemble, env.graph,
                                         uniform_rewards(env.graph, 0.0), eval);
  EXPECT_EQ(result.planner, PlannerKind::Stay);
  EXPECT_EQ(result.path.num_vertices(), 1);
  EXPECT_EQ(result.utility.value, 0.0);
}

TEST(MaxUtilitySelect, StartRewardOneOthersZeroStay) {
  Env env("S...\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  RewardMap r{{1.0, 0.0, 0.0, 0.0}, 1.0};
  const auto result = max_utility_select(ensemble, env.graph, r, eval);
  EXPECT_EQ(result.planner, PlannerKind::Stay);
  EXPECT_GT(result.utility.value, 0.0);
}

TEST(MaxUtilitySelect, LongerPathWinsWhenRewardOutpacesRisk) {
  Env env("S...\n");
  const RiskEvaluator eval(constant_state_model(0.05), env.graph, env.grid);
  RewardMap r{{0.0, 0.1, 0.9, 0.9}, 1.0};
  const auto ensemble = risk_aware_dijkstra(env.graph, eval);
  const auto result = max_utility_select(ensemble, env.graph, r, eval);
  EXPECT_EQ(result.path.num_vertices(), 4);
  // verify against a direct scan of every ensemble utility
  for (const auto& entry : ensemble.per_vertex) {
    if (!entry) continue;
    EXPECT_LE(accumulate_reward(entry->path, r) / entry->risk,
              result.utility.value + 1e-15);
  }
}

TEST(MaxUtilitySelect, EmptyEnsembleStays) {
  Env env("S\n");
  const RiskEvaluator eval(constant_state_model(0.1), env.graph, env.grid);
  MinRiskEnsemble empty;
  empty.per_vertex.resize(env.graph.num_vertices());
  const auto result = max_utility_select(empty, env.graph,
                                         uniform_rewards(env.graph, 0.4), eval);
  EXPECT_EQ(result.planner, PlannerKind::Stay);
}

TEST(Plan, DispatchRecordsPlanner) {
  Env env("S.\n..\n");
  // zero start reward and rewarding neighbors: moving always wins, so the
  // dispatched planner is what the result records
  RewardMap r{{0.0, 0.9, 0.9, 0.9}, 1.0};
  const auto exact = plan(env.graph, env.grid, r, default_risk_model(),
                          PlanMode::Exact);
  EXPECT_EQ(exact.planner, PlannerKind::Exact);
  const auto approx = plan(env.graph, env.grid, r, default_risk_model(),
                           PlanMode::Approximate);
  EXPECT_EQ(approx.planner, PlannerKind::Approximate);
  EXPECT_LE(approx.utility.value, exact.utility.value + 1e-9);
}

TEST(Plan, WalledInStartStays) {
  Env env("S#.\n##.\n...\n");
  const auto result = plan(env.graph, env.grid,
                           uniform_rewards(env.graph, 0.9),
                           default_risk_model(), PlanMode::Approximate);
  EXPECT_EQ(result.planner, PlannerKind::Stay);
  EXPECT_EQ(result.path.num_vertices(), 1);
}

TEST(Plan, UtilityRiskEqualsBreakdownTotal) {
  Env env("S...\n....\n");
  std::mt19937 rng(5);
  RewardMap r;
  r.gamma = 0.9;
  r.reward.resize(env.graph.num_vertices());
  for (auto& x : r.reward) x = (rng() % 1000) / 1000.0;
  for (const PlanMode mode : {PlanMode::Exact, PlanMode::Approximate}) {
    const auto result =
        plan(env.graph, env.grid, r, default_risk_model(), mode);
    EXPECT_DOUBLE_EQ(result.utility.risk, result.breakdown.total);
  }
}

TEST(Plan, DeterministicAcrossRuns) {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 20; ++iter) {
    const RandomInstance inst = make_random_instance(rng);
    const auto a = plan(inst.graph, inst.grid, inst.rewards, inst.model,
                        PlanMode::Approximate);
    const auto b = plan(inst.graph, inst.grid, inst.rewards, inst.model,
                        PlanMode::Approximate);
    EXPECT_EQ(a.path.vertices(), b.path.vertices());
    EXPECT_EQ(a.utility.value, b.utility.value);
    const auto c =
        plan(inst.graph, inst.grid, inst.rewards, inst.model, PlanMode::Exact);
    const auto d =
        plan(inst.graph, inst.grid, inst.rewards, inst.model, PlanMode::Exact);
    EXPECT_EQ(c.path.vertices(), d.path.vertices());
    EXPECT_EQ(c.utility.value, d.utility.value);
  }
}

TEST(Plan, ApproximateNeverBeatsExact) {
  std::mt19937 rng(123);
  for (int iter = 0; iter < 50; ++iter) {
    const RandomInstance inst = make_random_instance(rng);
    const auto exact =
        plan(inst.graph, inst.grid, inst.rewards, inst.model, PlanMode::Exact);
    const auto approx = plan(inst.graph, inst.grid, inst.rewards, inst.model,
                             PlanMode::Approximate);
    ASSERT_FALSE(exact.stats.truncated);
    EXPECT_LE(approx.utility.value, exact.utility.value + 1e-9);
  }
}

}  // namespace
}  // namespace riskplan
