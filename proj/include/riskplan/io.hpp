#pragma once

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "riskplan/planner.hpp"

namespace riskplan {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Map files: one character per cell ('#' obstacle, '.' free, 'S' start,
// 'P' point of interest), one row per line, 3-D maps as layers separated by a
// single blank line. UTF-8, LF endings.
// ---------------------------------------------------------------------------

namespace io_detail {

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

}  // namespace io_detail

inline OccupancyGrid parse_map(const std::string& text) {
  const auto lines = io_detail::split_lines(text);
  std::vector<std::vector<std::string>> layers;
  std::vector<int> layer_first_line;
  bool in_layer = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.find('\r') != std::string::npos)
      throw ParseError("carriage return in map file (LF endings required)",
                       static_cast<int>(i + 1), 1);
    if (line.empty()) {
      in_layer = false;
      continue;
    }
    if (!in_layer) {
      layers.emplace_back();
      layer_first_line.push_back(static_cast<int>(i + 1));
      in_layer = true;
    }
    layers.back().push_back(line);
  }
  if (layers.empty()) throw ParseError("map file has no rows", 1, 1);

  const int h = static_cast<int>(layers[0].size());
  const int w = static_cast<int>(layers[0][0].size());
  const int d = static_cast<int>(layers.size());
  std::optional<Cell> start, poi;
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(w) * h * d, 0);

  for (int z = 0; z < d; ++z) {
    if (static_cast<int>(layers[z].size()) != h)
      throw ParseError("layers must have the same number of rows",
                       layer_first_line[z], 1);
    for (int y = 0; y < h; ++y) {
      const std::string& row = layers[z][y];
      const int line_no = layer_first_line[z] + y;
      if (static_cast<int>(row.size()) != w)
        throw ParseError("rows must be rectangular", line_no,
                         static_cast<int>(row.size()) + 1);
      for (int x = 0; x < w; ++x) {
        const char c = row[x];
        const Cell cell{x, y, z};
        switch (c) {
          case '#':
            occupied[(static_cast<std::size_t>(z) * h + y) * w + x] = 1;
            break;
          case '.':
            break;
          case 'S':
            if (start)
              throw ParseError("more than one 'S' start cell", line_no, x + 1);
            start = cell;
            break;
          case 'P':
            if (poi)
              throw ParseError("more than one 'P' point of interest", line_no,
                               x + 1);
            poi = cell;
            break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'",
                             line_no, x + 1);
        }
      }
    }
  }
  if (!start) throw ParseError("map has no 'S' start cell", 1, 1);
  std::vector<int> dims = d > 1 ? std::vector<int>{w, h, d}
                                : std::vector<int>{w, h};
  return OccupancyGrid(std::move(dims), std::move(occupied), *start, poi);
}

inline std::string serialize_map(const OccupancyGrid& grid) {
  if (grid.poi() && (*grid.poi() == grid.start() || grid.occupied(*grid.poi())))
    throw InvariantError("poi cell cannot be rendered as 'P'", "map.poi");
  std::string out;
  for (int z = 0; z < grid.depth(); ++z) {
    if (z > 0) out.push_back('\n');
    for (int y = 0; y < grid.height(); ++y) {
      for (int x = 0; x < grid.width(); ++x) {
        const Cell c{x, y, z};
        char g = grid.occupied(c) ? '#' : '.';
        if (c == grid.start()) g = 'S';
        else if (grid.poi() && c == *grid.poi()) g = 'P';
        out.push_back(g);
      }
      out.push_back('\n');
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reward CSV: one float per cell, comma separated, congruent with the map
// (layers separated by blank lines). Obstacle cells are ignored; free cells
// must lie in [0, 1] — out-of-range input is an error, not a clamp.
// ---------------------------------------------------------------------------

inline RewardMap parse_rewards_csv(const std::string& text,
                                   const OccupancyGrid& grid,
                                   const PlanningGraph& graph, double gamma) {
  const auto lines = io_detail::split_lines(text);
  std::vector<std::vector<std::string>> layers;
  bool in_layer = false;
  std::vector<int> layer_first_line;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      in_layer = false;
      continue;
    }
    if (!in_layer) {
      layers.emplace_back();
      layer_first_line.push_back(static_cast<int>(i + 1));
      in_layer = true;
    }
    layers.back().push_back(lines[i]);
  }
  if (static_cast<int>(layers.size()) != grid.depth())
    throw ParseError("reward grid has " + std::to_string(layers.size()) +
                         " layers, map has " + std::to_string(grid.depth()),
                     1, 1);

  RewardMap out;
  out.gamma = gamma;
  out.reward.assign(graph.num_vertices(), 0.0);
  for (int z = 0; z < grid.depth(); ++z) {
    if (static_cast<int>(layers[z].size()) != grid.height())
      throw ParseError("reward layer row count does not match map",
                       layer_first_line[z], 1);
    for (int y = 0; y < grid.height(); ++y) {
      const int line_no = layer_first_line[z] + y;
      std::stringstream row(layers[z][y]);
      std::string tok;
      int x = 0;
      while (std::getline(row, tok, ',')) {
        if (x >= grid.width())
          throw ParseError("reward row longer than map width", line_no, x + 1);
        double value = 0.0;
        const char* begin = tok.data();
        const char* end = tok.data() + tok.size();
        while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
        while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
        const auto res = std::from_chars(begin, end, value);
        if (res.ec != std::errc() || res.ptr != end)
          throw ParseError("reward value is not a number", line_no, x + 1);
        const Cell cell{x, y, z};
        if (!grid.occupied(cell)) {
          if (!(value >= 0.0 && value <= 1.0))
            throw InvariantError("reward out of [0, 1] at cell (" +
                                     std::to_string(x) + ", " +
                                     std::to_string(y) + ", " +
                                     std::to_string(z) + ")",
                                 "rewards");
          out.reward[*graph.vertex_at(cell)] = value;
        }
        ++x;
      }
      if (x != grid.width())
        throw ParseError("reward row shorter than map width", line_no, x + 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config file (JSON). Unknown keys are rejected with their path; value
// violations surface as InvariantError. Missing keys take the defaults below.
// ---------------------------------------------------------------------------

struct Config {
  Connectivity connectivity = Connectivity::Orthogonal;
  double gamma = 1.0;
  RiskModel model = default_risk_model();
  EnumerationLimits limits;
  bool deterministic = true;  // tie-break determinism; always on

  friend bool operator==(const Config&, const Config&) = default;
};

namespace io_detail {

inline void expect_keys(const ojson& obj, std::vector<std::string_view> allowed,
                        const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed)
      if (key == a) ok = true;
    if (!ok) throw InvariantError("unknown key", path + "." + key);
  }
}

inline double get_number(const ojson& obj, const char* key, double fallback,
                         const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw InvariantError("expected a number", path + "." + key);
  return obj[key].get<double>();
}

inline StateRiskElement parse_state_element(const ojson& e,
                                            const std::string& path) {
  if (!e.is_object() || !e.contains("kind"))
    throw InvariantError("element must be an object with a kind", path);
  const std::string kind = e["kind"].get<std::string>();
  StateRiskElement out;
  if (kind == "distance_to_obstacle") {
    out.kind = StateElementKind::DistanceToObstacle;
    expect_keys(e, {"kind", "weight", "d_max"}, path);
    out.d_max = get_number(e, "d_max", out.d_max, path);
  } else if (kind == "visibility") {
    out.kind = StateElementKind::Visibility;
    expect_keys(e, {"kind", "weight", "window_radius"}, path);
    if (e.contains("window_radius")) {
      if (!e["window_radius"].is_number_integer())
        throw InvariantError("expected an integer", path + ".window_radius");
      out.window_radius = e["window_radius"].get<int>();
    }
  } else if (kind == "action_length") {
    out.kind = StateElementKind::ActionLength;
    expect_keys(e, {"kind", "weight", "risk_per_step"}, path);
    out.risk_per_step = get_number(e, "risk_per_step", out.risk_per_step, path);
  } else {
    throw InvariantError("unknown state element kind '" + kind + "'",
                         path + ".kind");
  }
  out.weight = get_number(e, "weight", out.weight, path);
  return out;
}

inline PathRiskElement parse_path_element(const ojson& e,
                                          const std::string& path) {
  if (!e.is_object() || !e.contains("kind"))
    throw InvariantError("element must be an object with a kind", path);
  const std::string kind = e["kind"].get<std::string>();
  PathRiskElement out;
  if (kind == "tortuosity") {
    out.kind = PathElementKind::Tortuosity;
    expect_keys(e, {"kind", "weight", "risk_per_turn"}, path);
    out.risk_per_turn = get_number(e, "risk_per_turn", out.risk_per_turn, path);
  } else if (kind == "path_length") {
    out.kind = PathElementKind::PathLength;
    expect_keys(e, {"kind", "weight", "risk_per_step"}, path);
    out.risk_per_step = get_number(e, "risk_per_step", out.risk_per_step, path);
  } else {
    throw InvariantError("unknown path element kind '" + kind + "'",
                         path + ".kind");
  }
  out.weight = get_number(e, "weight", out.weight, path);
  return out;
}

inline ojson parse_json(const std::string& text) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // recover line/col from the byte offset nlohmann reports
    int line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
}

}  // namespace io_detail

inline Config parse_config(const std::string& text) {
  const ojson j = io_detail::parse_json(text);
  if (!j.is_object()) throw InvariantError("config must be an object", "config");
  io_detail::expect_keys(
      j, {"connectivity", "gamma", "risk", "enumeration", "deterministic"},
      "config");
  Config cfg;
  if (j.contains("connectivity")) {
    const std::string c = j["connectivity"].get<std::string>();
    if (c == "orthogonal") cfg.connectivity = Connectivity::Orthogonal;
    else if (c == "full") cfg.connectivity = Connectivity::Full;
    else throw InvariantError("must be 'orthogonal' or 'full'",
                              "config.connectivity");
  }
  cfg.gamma = io_detail::get_number(j, "gamma", cfg.gamma, "config");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0))
    throw InvariantError("gamma must lie in [0, 1]", "config.gamma");
  if (j.contains("risk")) {
    const ojson& r = j["risk"];
    io_detail::expect_keys(
        r, {"state_elements", "path_elements", "combine_weights", "risk_floor"},
        "config.risk");
    if (r.contains("state_elements")) {
      cfg.model.state_elements.clear();
      int i = 0;
      for (const auto& e : r["state_elements"])
        cfg.model.state_elements.push_back(io_detail::parse_state_element(
            e, "config.risk.state_elements[" + std::to_string(i++) + "]"));
    }
    if (r.contains("path_elements")) {
      cfg.model.path_elements.clear();
      int i = 0;
      for (const auto& e : r["path_elements"])
        cfg.model.path_elements.push_back(io_detail::parse_path_element(
            e, "config.risk.path_elements[" + std::to_string(i++) + "]"));
    }
    if (r.contains("combine_weights")) {
      const ojson& w = r["combine_weights"];
      io_detail::expect_keys(w, {"states", "path"}, "config.risk.combine_weights");
      cfg.model.w_states = io_detail::get_number(w, "states", cfg.model.w_states,
                                                 "config.risk.combine_weights");
      cfg.model.w_path = io_detail::get_number(w, "path", cfg.model.w_path,
                                               "config.risk.combine_weights");
    }
    cfg.model.risk_floor = io_detail::get_number(r, "risk_floor",
                                                 cfg.model.risk_floor,
                                                 "config.risk");
  }
  if (j.contains("enumeration")) {
    const ojson& e = j["enumeration"];
    io_detail::expect_keys(e, {"max_paths", "max_seconds"}, "config.enumeration");
    if (e.contains("max_paths")) {
      if (!e["max_paths"].is_number_integer() ||
          e["max_paths"].get<std::int64_t>() < 0)
        throw InvariantError("max_paths must be a non-negative integer",
                             "config.enumeration.max_paths");
      cfg.limits.max_paths = e["max_paths"].get<std::uint64_t>();
    }
    cfg.limits.max_seconds = io_detail::get_number(
        e, "max_seconds", cfg.limits.max_seconds, "config.enumeration");
    if (!(cfg.limits.max_seconds > 0))
      throw InvariantError("max_seconds must be > 0",
                           "config.enumeration.max_seconds");
  }
  if (j.contains("deterministic")) {
    if (!j["deterministic"].is_boolean())
      throw InvariantError("expected a boolean", "config.deterministic");
    cfg.deterministic = j["deterministic"].get<bool>();
    if (!cfg.deterministic)
      throw InvariantError("deterministic tie-breaking cannot be disabled",
                           "config.deterministic");
  }
  validate(cfg.model);
  return cfg;
}

inline ojson config_to_json(const Config& cfg) {
  ojson j;
  j["connectivity"] = to_string(cfg.connectivity);
  j["gamma"] = cfg.gamma;
  ojson risk;
  risk["state_elements"] = ojson::array();
  for (const auto& e : cfg.model.state_elements) {
    ojson o;
    o["kind"] = to_string(e.kind);
    o["weight"] = e.weight;
    switch (e.kind) {
      case StateElementKind::DistanceToObstacle: o["d_max"] = e.d_max; break;
      case StateElementKind::Visibility: o["window_radius"] = e.window_radius; break;
      case StateElementKind::ActionLength: o["risk_per_step"] = e.risk_per_step; break;
    }
    risk["state_elements"].push_back(o);
  }
  risk["path_elements"] = ojson::array();
  for (const auto& e : cfg.model.path_elements) {
    ojson o;
    o["kind"] = to_string(e.kind);
    o["weight"] = e.weight;
    if (e.kind == PathElementKind::Tortuosity) o["risk_per_turn"] = e.risk_per_turn;
    else o["risk_per_step"] = e.risk_per_step;
    risk["path_elements"].push_back(o);
  }
  risk["combine_weights"] = {{"states", cfg.model.w_states},
                             {"path", cfg.model.w_path}};
  risk["risk_floor"] = cfg.model.risk_floor;
  j["risk"] = risk;
  j["enumeration"] = {{"max_paths", cfg.limits.max_paths},
                      {"max_seconds", cfg.limits.max_seconds}};
  j["deterministic"] = cfg.deterministic;
  return j;
}

inline std::string serialize_config(const Config& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Result file (JSON): planner mode, chosen path as cell coordinates, utility,
// risk breakdown, enumeration stats, truncation flag, and a full config echo.
// path_rewards stores the per-vertex reward looked up along the path so the
// reward side of the re-evaluation check needs no external file.
// ---------------------------------------------------------------------------

struct ResultDoc {
  std::string mode;     // requested planner mode
  std::string planner;  // what actually produced the path (may be "stay")
  bool truncated = false;
  std::uint64_t paths_enumerated = 0;
  std::vector<Cell> path;
  std::vector<double> path_rewards;  // reward(v) for each path vertex
  Utility utility;
  std::vector<std::pair<Cell, double>> per_state;
  double integrated_states_risk = 0.0;
  std::vector<std::pair<std::string, double>> per_path_element;
  double path_risk_component = 0.0;
  double total_risk = 0.0;
  Config config;

  friend bool operator==(const ResultDoc& a, const ResultDoc& b) {
    return a.mode == b.mode && a.planner == b.planner &&
           a.truncated == b.truncated &&
           a.paths_enumerated == b.paths_enumerated && a.path == b.path &&
           a.path_rewards == b.path_rewards &&
           a.utility.reward == b.utility.reward &&
           a.utility.risk == b.utility.risk &&
           a.utility.value == b.utility.value && a.per_state == b.per_state &&
           a.integrated_states_risk == b.integrated_states_risk &&
           a.per_path_element == b.per_path_element &&
           a.path_risk_component == b.path_risk_component &&
           a.total_risk == b.total_risk && a.config == b.config;
  }
};

inline ResultDoc make_result_doc(PlanMode mode, const PlanResult& result,
                                 const PlanningGraph& graph,
                                 const RewardMap& rewards, const Config& cfg) {
  ResultDoc doc;
  doc.mode = to_string(mode);
  doc.planner = to_string(result.planner);
  doc.truncated = result.stats.truncated;
  doc.paths_enumerated = result.stats.paths_enumerated;
  for (VertexId v : result.path.vertices()) {
    doc.path.push_back(graph.cell_of(v));
    doc.path_rewards.push_back(rewards.reward[v]);
  }
  doc.utility = result.utility;
  for (const auto& [v, r] : result.breakdown.per_state)
    doc.per_state.emplace_back(graph.cell_of(v), r);
  doc.integrated_states_risk = result.breakdown.integrated_states_risk;
  for (const auto& [kind, unit] : result.breakdown.per_path_element)
    doc.per_path_element.emplace_back(to_string(kind), unit);
  doc.path_risk_component = result.breakdown.path_risk_component;
  doc.total_risk = result.breakdown.total;
  doc.config = cfg;
  return doc;
}

namespace io_detail {

inline ojson cell_to_json(const Cell& c, int ndim) {
  return ndim == 3 ? ojson::array({c.x, c.y, c.z}) : ojson::array({c.x, c.y});
}

inline Cell cell_from_json(const ojson& j, const std::string& path) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3))
    throw InvariantError("cell must be [x, y] or [x, y, z]", path);
  Cell c{j[0].get<int>(), j[1].get<int>(), 0};
  if (j.size() == 3) c.z = j[2].get<int>();
  return c;
}

}  // namespace io_detail

inline std::string serialize_result(const ResultDoc& doc, int ndim) {
  ojson j;
  j["mode"] = doc.mode;
  j["planner"] = doc.planner;
  j["truncated"] = doc.truncated;
  j["path"] = ojson::array();
  for (const Cell& c : doc.path) j["path"].push_back(io_detail::cell_to_json(c, ndim));
  j["path_rewards"] = doc.path_rewards;
  j["utility"] = {{"reward", doc.utility.reward},
                  {"risk", doc.utility.risk},
                  {"value", doc.utility.value}};
  ojson breakdown;
  breakdown["per_state"] = ojson::array();
  for (const auto& [c, r] : doc.per_state)
    breakdown["per_state"].push_back(
        {{"cell", io_detail::cell_to_json(c, ndim)}, {"risk", r}});
  breakdown["integrated_states_risk"] = doc.integrated_states_risk;
  breakdown["per_path_element"] = ojson::array();
  for (const auto& [kind, unit] : doc.per_path_element)
    breakdown["per_path_element"].push_back({{"kind", kind}, {"unit", unit}});
  breakdown["path_risk_component"] = doc.path_risk_component;
  breakdown["total"] = doc.total_risk;
  j["risk_breakdown"] = breakdown;
  j["enumeration"] = {{"paths_enumerated", doc.paths_enumerated}};
  j["config"] = config_to_json(doc.config);
  return j.dump(2) + "\n";
}

inline ResultDoc parse_result(const std::string& text) {
  const ojson j = io_detail::parse_json(text);
  io_detail::expect_keys(j,
                         {"mode", "planner", "truncated", "path", "path_rewards",
                          "utility", "risk_breakdown", "enumeration", "config"},
                         "result");
  ResultDoc doc;
  doc.mode = j["mode"].get<std::string>();
  doc.planner = j["planner"].get<std::string>();
  doc.truncated = j["truncated"].get<bool>();
  for (const auto& c : j["path"])
    doc.path.push_back(io_detail::cell_from_json(c, "result.path"));
  doc.path_rewards = j["path_rewards"].get<std::vector<double>>();
  doc.utility = {j["utility"]["reward"].get<double>(),
                 j["utility"]["risk"].get<double>(),
                 j["utility"]["value"].get<double>()};
  const ojson& b = j["risk_breakdown"];
  for (const auto& e : b["per_state"])
    doc.per_state.emplace_back(
        io_detail::cell_from_json(e["cell"], "result.risk_breakdown.per_state"),
        e["risk"].get<double>());
  doc.integrated_states_risk = b["integrated_states_risk"].get<double>();
  for (const auto& e : b["per_path_element"])
    doc.per_path_element.emplace_back(e["kind"].get<std::string>(),
                                      e["unit"].get<double>());
  doc.path_risk_component = b["path_risk_component"].get<double>();
  doc.total_risk = b["total"].get<double>();
  doc.paths_enumerated = j["enumeration"]["paths_enumerated"].get<std::uint64_t>();
  doc.config = parse_config(j["config"].dump());
  return doc;
}

// Re-evaluates the serialized path under the echoed config against the grid
// and checks that risk, reward, and utility reproduce within tol. Every
// emitted result must survive this.
inline void verify_result(const ResultDoc& doc, const OccupancyGrid& grid,
                          double tol = 1e-9) {
  const PlanningGraph graph =
      PlanningGraph::from_grid(grid, doc.config.connectivity);
  const RiskEvaluator eval(doc.config.model, graph, grid);
  std::vector<VertexId> verts;
  for (const Cell& c : doc.path) {
    const auto v = graph.vertex_at(c);
    if (!v) throw InvariantError("path cell is not a free cell", "result.path");
    verts.push_back(*v);
  }
  const Path path = Path::from_vertices(graph, verts);
  const double risk = eval.path_risk(path).total;
  if (std::abs(risk - doc.utility.risk) > tol ||
      std::abs(risk - doc.total_risk) > tol)
    throw InvariantError("re-evaluated risk differs from serialized risk",
                         "result.utility.risk");
  double reward = 0.0;
  if (doc.path_rewards.size() != doc.path.size())
    throw InvariantError("path_rewards does not match path", "result");
  if (doc.path.size() == 1) {
    reward = doc.path_rewards[0];  // stay-at-start pricing
  } else {
    for (std::size_t i = 1; i < doc.path_rewards.size(); ++i)
      reward = doc.config.gamma * reward + doc.path_rewards[i];
  }
  if (std::abs(reward - doc.utility.reward) > tol)
    throw InvariantError("re-evaluated reward differs from serialized reward",
                         "result.utility.reward");
  if (std::abs(reward / risk - doc.utility.value) > tol)
    throw InvariantError("re-evaluated utility differs from serialized value",
                         "result.utility.value");
}

}  // namespace riskplan
