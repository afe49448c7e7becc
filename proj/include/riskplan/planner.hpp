#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "riskplan/reward.hpp"
#include "riskplan/risk.hpp"

namespace riskplan {

enum class PlannerKind { Exact, Approximate, Stay };

inline const char* to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::Exact: return "exact";
    case PlannerKind::Approximate: return "approximate";
    case PlannerKind::Stay: return "stay";
  }
  return "?";
}

struct EnumerationLimits {
  std::uint64_t max_paths = 5'000'000;
  double max_seconds = 60.0;

  friend bool operator==(const EnumerationLimits&,
                         const EnumerationLimits&) = default;
};

struct EnumerationStats {
  std::uint64_t paths_enumerated = 0;
  bool truncated = false;
};

struct PlanResult {
  Path path;
  Utility utility;        // utility.risk == breakdown.total
  RiskBreakdown breakdown;
  PlannerKind planner = PlannerKind::Stay;
  EnumerationStats stats; // zeros when enumeration was not involved
};

namespace detail {

// Shared tie-break: a candidate replaces the incumbent only when strictly
// better — higher utility, then shorter path, then lexicographically smaller
// vertex sequence. Seeding the incumbent with the stay-at-start unit path
// therefore makes stay win all ties.
inline bool beats(double value_a, std::span<const VertexId> a, double value_b,
                  std::span<const VertexId> b) {
  if (value_a != value_b) return value_a > value_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

// Depth-first enumeration of every simple path out of the start vertex,
// scoring each with the discounted-reward / path-risk utility and keeping the
// best (the stay-at-start unit path included). Iterative: the recursion depth
// of the textbook formulation equals path length, which does not survive
// larger grids. Reward and risk counters are carried per stack frame, so
// backtracking never divides by gamma.
inline PlanResult exact_enumerate(const PlanningGraph& g,
                                  const RewardMap& rewards,
                                  const RiskEvaluator& eval,
                                  const EnumerationLimits& limits = {}) {
  const VertexId start = g.start();
  EnumerationStats stats;

  std::vector<VertexId> path{start};
  std::vector<VertexId> best_path{start};
  double best_value = stay_utility(start, rewards, eval).value;

  struct Frame {
    VertexId v;
    std::uint32_t next = 0;  // index into g.neighbors(v)
    double reward;
    double state_sum;
    int turns;
  };
  std::vector<Frame> stack;
  stack.push_back({start, 0, 0.0, eval.state_risk(start), 0});
  std::vector<std::uint8_t> on_path(g.num_vertices(), 0);
  on_path[start] = 1;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<VertexId> candidate;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto nbrs = g.neighbors(f.v);
    if (f.next == nbrs.size()) {
      on_path[f.v] = 0;
      path.pop_back();
      stack.pop_back();
      continue;
    }
    const Adjacent a = nbrs[f.next++];
    if (on_path[a.vertex]) continue;

    if (stats.paths_enumerated >= limits.max_paths) {
      stats.truncated = true;
      break;
    }
    if ((stats.paths_enumerated & 1023) == 0) {
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - t0;
      if (dt.count() > limits.max_seconds) {
        stats.truncated = true;
        break;
      }
    }

    int turns = f.turns;
    if (path.size() >= 2) {
      const Cell prev = g.cell_of(path.back()) - g.cell_of(path[path.size() - 2]);
      const Cell next = g.cell_of(a.vertex) - g.cell_of(path.back());
      if (!(prev == next)) ++turns;
    }
    const double state_sum = f.state_sum + eval.state_risk(a.vertex);
    const double reward = rewards.gamma * f.reward + rewards.reward[a.vertex];
    const int steps = static_cast<int>(path.size());
    const double total = eval.total_from_counts(state_sum, turns, steps);
    const double value = reward / total;

    ++stats.paths_enumerated;
    if (value >= best_value) {
      candidate.assign(path.begin(), path.end());
      candidate.push_back(a.vertex);
      if (detail::beats(value, candidate, best_value, best_path)) {
        best_value = value;
        best_path = candidate;
      }
    }

    path.push_back(a.vertex);
    on_path[a.vertex] = 1;
    stack.push_back({a.vertex, 0, reward, state_sum, turns});
  }

  Path chosen = Path::from_vertices(g, best_path);
  RiskBreakdown breakdown = eval.path_risk(chosen);
  const bool stayed = chosen.num_vertices() == 1;
  const double reward =
      stayed ? stay_reward(start, rewards) : accumulate_reward(chosen, rewards);
  return {std::move(chosen), make_utility(reward, breakdown.total),
          std::move(breakdown), stayed ? PlannerKind::Stay : PlannerKind::Exact,
          stats};
}

// Minimum-risk simple path from the start to every reachable vertex.
// Unreachable vertices (and the start itself) hold no entry.
struct MinRiskEnsemble {
  struct Entry {
    Path path;
    double risk;
  };
  std::vector<std::optional<Entry>> per_vertex;  // indexed by vertex id
};

// Directional minimum-risk search. Two departures from the classic
// vertex-closing shortest-path loop:
//   dynamical  — relaxation re-evaluates the full history path, reconstructed
//                by backtracking predecessor directions, instead of adding an
//                edge cost to a stored scalar;
//   directional — the unit that is labeled, relaxed, and closed is a
//                (vertex, incoming edge) direction, because the minimum-risk
//                path to v via u need not contain the minimum-risk path to u.
// Requires a risk model that never decreases under path extension; a sampled
// self-check runs before the search and rejects models that violate it.
inline MinRiskEnsemble risk_aware_dijkstra(const PlanningGraph& g,
                                           const RiskEvaluator& eval) {
  check_monotone_sampled(eval);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const VertexId start = g.start();
  const int n = g.num_vertices();

  // Label table: per vertex one slot per incident edge (adjacency order) plus
  // a trailing no-incoming-edge slot for the start vertex.
  std::vector<int> base(n + 1, 0);
  for (VertexId v = 0; v < n; ++v)
    base[v + 1] = base[v] + g.degree(v) + (v == start ? 1 : 0);
  const int num_labels = base[n];

  struct Label {
    double r = std::numeric_limits<double>::infinity();
    int len = 0;
    std::int32_t pd = -1;
    std::uint32_t version = 0;
    bool closed = false;
  };
  std::vector<Label> labels(num_labels);
  std::vector<VertexId> label_vertex(num_labels);
  std::vector<EdgeId> label_edge(num_labels);
  for (VertexId v = 0; v < n; ++v) {
    const auto nbrs = g.neighbors(v);
    for (int s = 0; s < static_cast<int>(nbrs.size()); ++s) {
      label_vertex[base[v] + s] = v;
      label_edge[base[v] + s] = nbrs[s].edge;
    }
    if (v == start) {
      label_vertex[base[v] + g.degree(v)] = v;
      label_edge[base[v] + g.degree(v)] = kNoEdge;
    }
  }
  const auto slot_of = [&](VertexId v, EdgeId e) -> int {
    const auto nbrs = g.neighbors(v);
    for (int s = 0; s < static_cast<int>(nbrs.size()); ++s)
      if (nbrs[s].edge == e) return base[v] + s;
    throw InvariantError("edge not incident to vertex", "planner.labels");
  };

  // Lazy-deletion queue: stale versions are skipped on pop. Key order (risk,
  // path length, vertex id, edge id) fixes every tie deterministically.
  using QEntry = std::tuple<double, int, VertexId, EdgeId, std::int32_t,
                            std::uint32_t>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> queue;

  for (int s = base[start]; s < base[start + 1]; ++s) {
    labels[s].r = 0.0;
    labels[s].len = 1;
    labels[s].version = 1;
    queue.push({0.0, 1, start, label_edge[s], s, 1});
  }

  const auto backtrack = [&](std::int32_t id, std::vector<VertexId>& out) {
    out.clear();
    while (id >= 0) {
      out.push_back(label_vertex[id]);
      id = labels[id].pd;
    }
    std::reverse(out.begin(), out.end());
  };

  std::vector<VertexId> path_u;
  std::vector<std::uint32_t> mark(n, 0);
  std::uint32_t stamp = 0;
  double last_popped = 0.0;

  while (!queue.empty()) {
    const auto [r, len, v, e, id, version] = queue.top();
    queue.pop();
    Label& cur = labels[id];
    if (version != cur.version || cur.closed) continue;
    if (r < last_popped - 1e-12)
      throw InvariantError("directions closed out of order", "planner.closing");
    last_popped = r;
    cur.closed = true;

    backtrack(id, path_u);
    ++stamp;
    for (VertexId p : path_u) mark[p] = stamp;

    for (const Adjacent& a : g.neighbors(v)) {
      if (mark[a.vertex] == stamp) continue;  // extension must stay simple
      path_u.push_back(a.vertex);
      const double risk = eval.evaluate_total(path_u);
      path_u.pop_back();

      const int slot = slot_of(a.vertex, a.edge);
      Label& target = labels[slot];
      if (target.closed) {
        if (risk < target.r - 1e-12)
          throw InvariantError("closed direction would have improved",
                               "planner.closing");
        continue;
      }
      if (risk < target.r) {
        target.r = risk;
        target.len = len + 1;
        target.pd = id;
        ++target.version;
        queue.push({risk, target.len, a.vertex, a.edge, slot, target.version});
      }
    }
  }

  MinRiskEnsemble out;
  out.per_vertex.resize(n);
  std::vector<VertexId> best_path, cand_path;
  for (VertexId v = 0; v < n; ++v) {
    if (v == start) continue;
    int best = -1;
    for (int s = base[v]; s < base[v + 1]; ++s) {
      if (labels[s].r == kInf) continue;
      if (best < 0 || labels[s].r < labels[best].r ||
          (labels[s].r == labels[best].r && labels[s].len < labels[best].len)) {
        best = s;
        backtrack(best, best_path);
      } else if (labels[s].r == labels[best].r &&
                 labels[s].len == labels[best].len) {
        backtrack(s, cand_path);
        if (std::lexicographical_compare(cand_path.begin(), cand_path.end(),
                                         best_path.begin(), best_path.end())) {
          best = s;
          best_path = cand_path;
        }
      }
    }
    if (best < 0) continue;
    out.per_vertex[v] = MinRiskEnsemble::Entry{
        Path::from_vertices(g, best_path), labels[best].r};
  }
  return out;
}

// Picks the maximum-utility member of the ensemble, comparing against the
// stay-at-start unit path. Ties resolve toward stay, then toward the shorter
// and lexicographically smaller path.
inline PlanResult max_utility_select(const MinRiskEnsemble& ensemble,
                                     const PlanningGraph& g,
                                     const RewardMap& rewards,
                                     const RiskEvaluator& eval) {
  const VertexId start = g.start();
  std::vector<VertexId> best_path{start};
  double best_value = stay_utility(start, rewards, eval).value;

  for (VertexId v = 0; v < static_cast<VertexId>(ensemble.per_vertex.size());
       ++v) {
    const auto& entry = ensemble.per_vertex[v];
    if (!entry) continue;
    const double value = accumulate_reward(entry->path, rewards) / entry->risk;
    if (detail::beats(value, entry->path.vertices(), best_value, best_path)) {
      best_value = value;
      best_path = entry->path.vertices();
    }
  }

  Path chosen = Path::from_vertices(g, best_path);
  RiskBreakdown breakdown = eval.path_risk(chosen);
  const bool stayed = chosen.num_vertices() == 1;
  const double reward =
      stayed ? stay_reward(start, rewards) : accumulate_reward(chosen, rewards);
  return {std::move(chosen), make_utility(reward, breakdown.total),
          std::move(breakdown),
          stayed ? PlannerKind::Stay : PlannerKind::Approximate,
          EnumerationStats{}};
}

enum class PlanMode { Exact, Approximate };

inline const char* to_string(PlanMode m) {
  return m == PlanMode::Exact ? "exact" : "approximate";
}

// Facade over the exact enumerator and the two-stage approximate pipeline.
inline PlanResult plan(const PlanningGraph& g, const OccupancyGrid& grid,
                       const RewardMap& rewards, const RiskModel& model,
                       PlanMode mode, const EnumerationLimits& limits = {}) {
  validate(model);
  validate(rewards, g);
  RiskEvaluator eval(model, g, grid);
  if (mode == PlanMode::Exact) return exact_enumerate(g, rewards, eval, limits);
  const MinRiskEnsemble ensemble = risk_aware_dijkstra(g, eval);
  return max_utility_select(ensemble, g, rewards, eval);
}

}  // namespace riskplan
