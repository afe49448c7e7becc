#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "riskplan/planner.hpp"

namespace riskplan {

// Brute-force reference implementations used to validate the planners, plus
// the utility <-> edge-weight conversion tooling that shows why classical
// shortest-path algorithms cannot be applied directly. Everything here walks
// graphs with its own plain recursion; nothing is shared with the planners'
// traversal code, so a bug cannot hide in both sides of a comparison.

struct CountResult {
  std::uint64_t count = 0;
  bool truncated = false;
};

namespace oracle_detail {

inline void count_rec(const PlanningGraph& g, VertexId v,
                      std::vector<std::uint8_t>& on, std::uint64_t cap,
                      CountResult& out) {
  for (const Adjacent& a : g.neighbors(v)) {
    if (out.truncated) return;
    if (on[a.vertex]) continue;
    if (out.count >= cap) {
      out.truncated = true;
      return;
    }
    ++out.count;
    on[a.vertex] = 1;
    count_rec(g, a.vertex, on, cap, out);
    on[a.vertex] = 0;
  }
}

// Strictly-better comparison mirroring the planners' documented tie rule
// (higher value wins; at equal value shorter, then lexicographically smaller,
// paths win). Reimplemented here on purpose.
inline bool oracle_beats(double va, const std::vector<VertexId>& a, double vb,
                         const std::vector<VertexId>& b) {
  if (va != vb) return va > vb;
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

}  // namespace oracle_detail

// Exact number of simple paths of length >= 1 starting at origin.
inline CountResult count_simple_paths(
    const PlanningGraph& g, VertexId origin,
    std::uint64_t cap = std::numeric_limits<std::uint64_t>::max()) {
  std::vector<std::uint8_t> on(g.num_vertices(), 0);
  on[origin] = 1;
  CountResult out;
  oracle_detail::count_rec(g, origin, on, cap, out);
  return out;
}

struct OraclePath {
  Path path;
  double risk;
};

namespace oracle_detail {

struct MinRiskScan {
  const PlanningGraph& g;
  const RiskEvaluator& eval;
  std::vector<VertexId> walk;
  std::vector<std::uint8_t> on;
  std::vector<double> best_risk;
  std::vector<std::vector<VertexId>> best_path;

  explicit MinRiskScan(const PlanningGraph& graph, const RiskEvaluator& e)
      : g(graph),
        eval(e),
        on(graph.num_vertices(), 0),
        best_risk(graph.num_vertices(),
                  std::numeric_limits<double>::infinity()),
        best_path(graph.num_vertices()) {}

  void run() {
    const VertexId s = g.start();
    walk.push_back(s);
    on[s] = 1;
    rec(s);
  }

  void rec(VertexId v) {
    for (const Adjacent& a : g.neighbors(v)) {
      if (on[a.vertex]) continue;
      walk.push_back(a.vertex);
      const double risk = eval.evaluate_total(walk);
      auto& br = best_risk[a.vertex];
      auto& bp = best_path[a.vertex];
      const bool better =
          risk < br ||
          (risk == br &&
           (walk.size() < bp.size() ||
            (walk.size() == bp.size() &&
             std::lexicographical_compare(walk.begin(), walk.end(), bp.begin(),
                                          bp.end()))));
      if (better) {
        br = risk;
        bp = walk;
      }
      on[a.vertex] = 1;
      rec(a.vertex);
      on[a.vertex] = 0;
      walk.pop_back();
    }
  }
};

}  // namespace oracle_detail

// Minimum-risk simple path from the start to every vertex, by exhaustive
// enumeration with full dynamic risk evaluation. Feasible on small instances
// only. Index = vertex id; start and unreachable vertices are empty.
inline std::vector<std::optional<OraclePath>> min_risk_all(
    const PlanningGraph& g, const RiskEvaluator& eval) {
  oracle_detail::MinRiskScan scan(g, eval);
  scan.run();
  std::vector<std::optional<OraclePath>> out(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (v == g.start() || scan.best_path[v].empty()) continue;
    out[v] = OraclePath{Path::from_vertices(g, scan.best_path[v]),
                        scan.best_risk[v]};
  }
  return out;
}

inline std::optional<OraclePath> min_risk_oracle(const PlanningGraph& g,
                                                 const RiskEvaluator& eval,
                                                 VertexId target) {
  return min_risk_all(g, eval)[target];
}

namespace oracle_detail {

struct MaxUtilityScan {
  const PlanningGraph& g;
  const RewardMap& rewards;
  const RiskEvaluator& eval;
  std::uint64_t cap;
  std::vector<VertexId> walk;
  std::vector<std::uint8_t> on;
  std::vector<VertexId> best;
  double best_value;
  EnumerationStats stats;

  MaxUtilityScan(const PlanningGraph& graph, const RewardMap& r,
                 const RiskEvaluator& e, std::uint64_t path_cap)
      : g(graph), rewards(r), eval(e), cap(path_cap),
        on(graph.num_vertices(), 0) {}

  void run() {
    const VertexId s = g.start();
    walk.push_back(s);
    on[s] = 1;
    best = walk;
    best_value = stay_utility(s, rewards, eval).value;
    rec(s);
  }

  void rec(VertexId v) {
    for (const Adjacent& a : g.neighbors(v)) {
      if (stats.truncated) return;
      if (on[a.vertex]) continue;
      if (stats.paths_enumerated >= cap) {
        stats.truncated = true;
        return;
      }
      ++stats.paths_enumerated;
      walk.push_back(a.vertex);
      // full recomputation on every node: this is the reference, so no
      // incremental bookkeeping is borrowed from the planner
      const double value =
          accumulate_reward(walk, rewards) / eval.evaluate_total(walk);
      if (oracle_beats(value, walk, best_value, best)) {
        best_value = value;
        best = walk;
      }
      on[a.vertex] = 1;
      rec(a.vertex);
      on[a.vertex] = 0;
      walk.pop_back();
    }
  }
};

}  // namespace oracle_detail

// Globally maximum-utility simple path (stay-at-start included), independent
// of exact_enumerate. Ground truth for the suboptimality bound.
inline PlanResult max_utility_oracle(const PlanningGraph& g,
                                     const RewardMap& rewards,
                                     const RiskEvaluator& eval,
                                     const EnumerationLimits& limits = {}) {
  oracle_detail::MaxUtilityScan scan(g, rewards, eval, limits.max_paths);
  scan.run();
  Path chosen = Path::from_vertices(g, scan.best);
  RiskBreakdown breakdown = eval.path_risk(chosen);
  const bool stayed = chosen.num_vertices() == 1;
  const double reward = stayed ? stay_reward(g.start(), rewards)
                               : accumulate_reward(chosen, rewards);
  return {std::move(chosen), make_utility(reward, breakdown.total),
          std::move(breakdown), stayed ? PlannerKind::Stay : PlannerKind::Exact,
          scan.stats};
}

// Directed graph with real (possibly negative) edge weights, as produced by
// differencing inverse utilities along a chain of path prefixes.
struct WeightedDigraph {
  struct Arc {
    VertexId from, to;
    double weight;
  };
  int num_vertices = 0;
  std::vector<Arc> arcs;
};

struct PrefixUtility {
  std::vector<VertexId> prefix;
  double inverse_utility;  // risk / reward of the prefix
};

// Converts a chain of prefixes (each extending the previous by one vertex,
// the first being a single step out of the origin) into edge weights: step k
// weighs inverse_utility(k) - inverse_utility(k-1), with the origin-only
// prefix at 0. Repeated arcs are kept as parallel edges.
inline WeightedDigraph utility_to_edge_weights(
    std::span<const PrefixUtility> chain, int num_vertices = -1) {
  if (chain.empty())
    throw InvariantError("empty prefix chain", "utility_to_edge_weights");
  if (chain[0].prefix.size() != 2)
    throw InvariantError("first prefix must be a single step from the origin",
                         "utility_to_edge_weights");
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const auto& prev = chain[k - 1].prefix;
    const auto& cur = chain[k].prefix;
    if (cur.size() != prev.size() + 1 ||
        !std::equal(prev.begin(), prev.end(), cur.begin()))
      throw InvariantError("prefixes do not form a chain",
                           "utility_to_edge_weights");
  }
  WeightedDigraph out;
  VertexId max_id = 0;
  for (const auto& p : chain)
    for (VertexId v : p.prefix) max_id = std::max(max_id, v);
  out.num_vertices = num_vertices >= 0 ? num_vertices : max_id + 1;
  double prev_inv = 0.0;
  for (const auto& p : chain) {
    const VertexId from = p.prefix[p.prefix.size() - 2];
    const VertexId to = p.prefix.back();
    out.arcs.push_back({from, to, p.inverse_utility - prev_inv});
    prev_inv = p.inverse_utility;
  }
  return out;
}

struct NegativeCycle {
  std::vector<VertexId> cycle;  // in travel order; closes back to front()
  double total_weight;
};

// Bellman-Ford negative-cycle detection over all vertices (virtual zero
// source). Returns one negative-total cycle if any exists.
inline std::optional<NegativeCycle> find_negative_cycle(
    const WeightedDigraph& g) {
  const int n = g.num_vertices;
  if (n == 0) return std::nullopt;
  std::vector<double> dist(n, 0.0);
  std::vector<int> pred_arc(n, -1);
  int touched = -1;
  for (int pass = 0; pass < n; ++pass) {
    touched = -1;
    for (std::size_t i = 0; i < g.arcs.size(); ++i) {
      const auto& a = g.arcs[i];
      if (dist[a.from] + a.weight < dist[a.to]) {
        dist[a.to] = dist[a.from] + a.weight;
        pred_arc[a.to] = static_cast<int>(i);
        touched = a.to;
      }
    }
    if (touched < 0) return std::nullopt;
  }
  // A relaxation in pass n means touched lies on or downstream of a negative
  // cycle; n predecessor hops land inside it.
  VertexId x = touched;
  for (int i = 0; i < n; ++i) {
    if (pred_arc[x] < 0) return std::nullopt;  // unreachable in theory
    x = g.arcs[pred_arc[x]].from;
  }
  NegativeCycle out;
  out.total_weight = 0.0;
  VertexId v = x;
  std::vector<VertexId> rev;
  do {
    const auto& a = g.arcs[pred_arc[v]];
    rev.push_back(v);
    out.total_weight += a.weight;
    v = a.from;
  } while (v != x);
  out.cycle.assign(rev.rbegin(), rev.rend());
  return out;
}

}  // namespace riskplan
