#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "riskplan/risk.hpp"

namespace riskplan {

// Per-vertex reward in [0, 1] plus the discount factor used when rewards are
// accumulated along a path.
struct RewardMap {
  std::vector<double> reward;
  double gamma = 1.0;
};

inline void validate(const RewardMap& r, const PlanningGraph& g) {
  if (r.reward.size() != static_cast<std::size_t>(g.num_vertices()))
    throw InvariantError("reward map does not cover every vertex", "rewards");
  for (double v : r.reward)
    if (!(v >= 0.0 && v <= 1.0))
      throw InvariantError("reward values must lie in [0, 1]", "rewards");
  if (!(r.gamma >= 0.0 && r.gamma <= 1.0))
    throw InvariantError("gamma must lie in [0, 1]", "gamma");
}

// r starts at 0 and folds in each vertex after the first: r <- gamma*r + reward(v).
// The origin's reward is excluded; the stay-at-start unit path is the one
// exception and is priced by stay_reward below.
inline double accumulate_reward(std::span<const VertexId> verts,
                                const RewardMap& rewards) {
  double r = 0.0;
  for (std::size_t i = 1; i < verts.size(); ++i)
    r = rewards.gamma * r + rewards.reward[verts[i]];
  return r;
}

inline double accumulate_reward(const Path& p, const RewardMap& rewards) {
  return accumulate_reward(p.vertices(), rewards);
}

// Inverse of one accumulation step. gamma = 0 is not invertible; callers that
// backtrack under gamma = 0 must recompute from a stored prefix instead.
inline std::optional<double> unaccumulate_reward(double r, double v_reward,
                                                 double gamma) {
  if (gamma == 0.0) return std::nullopt;
  return (r - v_reward) / gamma;
}

struct Utility {
  double reward = 0.0;
  double risk = 0.0;  // always >= risk_floor > 0
  double value = 0.0; // reward / risk
};

inline Utility make_utility(double reward, double risk) {
  return {reward, risk, reward / risk};
}

inline Utility utility_of(const Path& p, const RewardMap& rewards,
                          const RiskEvaluator& eval) {
  return make_utility(accumulate_reward(p, rewards),
                      eval.path_risk(p).total);
}

// Reward credited to the single-vertex "stay at start" path. A plain
// accumulation would price it 0 and staying could never win selection, which
// contradicts comparing against the option of not moving at all.
inline double stay_reward(VertexId start, const RewardMap& rewards) {
  return rewards.reward[start];
}

inline Utility stay_utility(VertexId start, const RewardMap& rewards,
                            const RiskEvaluator& eval) {
  const std::vector<VertexId> unit{start};
  return make_utility(stay_reward(start, rewards), eval.evaluate_total(unit));
}

struct SynthRewardParams {
  double standoff = 2.0;  // ideal viewing distance from the poi, in cells
  double falloff = 3.0;   // distance over which reward decays to zero
};

// Deterministic synthetic viewpoint-quality field: reward peaks on the ring
// at `standoff` cells from the point of interest and decays linearly to zero
// `falloff` cells away from that ring.
inline RewardMap synth_reward_map(const OccupancyGrid& grid,
                                  const PlanningGraph& g, const Cell& poi,
                                  SynthRewardParams params = {},
                                  double gamma = 1.0) {
  if (!grid.in_bounds(poi))
    throw InvariantError("poi cell out of bounds", "rewards.poi");
  RewardMap out;
  out.gamma = gamma;
  out.reward.resize(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const Cell d = g.cell_of(v) - poi;
    const double dist =
        std::sqrt(static_cast<double>(d.x) * d.x + static_cast<double>(d.y) * d.y +
                  static_cast<double>(d.z) * d.z);
    out.reward[v] =
        std::clamp(1.0 - std::abs(dist - params.standoff) / params.falloff, 0.0, 1.0);
  }
  return out;
}

}  // namespace riskplan
