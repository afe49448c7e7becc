#pragma once

#include <span>
#include <string>
#include <vector>

#include "riskplan/reward.hpp"

namespace riskplan {

struct RenderPath {
  std::string label;
  std::vector<Cell> cells;
};

namespace render_detail {

inline constexpr int kCellPx = 24;

inline void append_int(std::string& s, long v) { s += std::to_string(v); }

// white -> green ramp; integer channels keep the output byte-stable
inline std::string reward_fill(double v) {
  const int r = 255 - static_cast<int>(v * 195.0);
  const int g = 255 - static_cast<int>(v * 55.0);
  const int b = 255 - static_cast<int>(v * 195.0);
  return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," +
         std::to_string(b) + ")";
}

inline const char* stroke_for(std::size_t i) {
  static constexpr const char* palette[] = {"#1f4e9c", "#e67e22", "#8e44ad",
                                            "#16a085"};
  return palette[i % 4];
}

}  // namespace render_detail

// Deterministic SVG of one grid layer: obstacles red, free cells shaded by
// reward (greener = more reward), path polylines with one stroke per planner,
// start ring and point-of-interest diamond. 3-D grids require an explicit
// layer; 2-D grids take layer 0 (or -1 for "unset").
inline std::string render_svg(const OccupancyGrid& grid,
                              const PlanningGraph* graph,
                              const RewardMap* rewards,
                              std::span<const RenderPath> paths,
                              int layer = -1) {
  if (grid.ndim() == 3 && layer < 0)
    throw InvariantError("3-D grid requires a layer selection", "render.layer");
  if (layer < 0) layer = 0;
  if (layer >= grid.depth())
    throw InvariantError("layer out of range", "render.layer");

  using render_detail::kCellPx;
  const int w = grid.width() * kCellPx;
  const int h = grid.height() * kCellPx;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(w) + "\" height=\"" + std::to_string(h) +
       "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
       "\">\n";

  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const Cell c{x, y, layer};
      std::string fill = "#ffffff";
      if (grid.occupied(c)) {
        fill = "#c0392b";
      } else if (rewards && graph) {
        if (const auto v = graph->vertex_at(c))
          fill = render_detail::reward_fill(rewards->reward[*v]);
      }
      s += "  <rect x=\"" + std::to_string(x * kCellPx) + "\" y=\"" +
           std::to_string(y * kCellPx) + "\" width=\"" +
           std::to_string(kCellPx) + "\" height=\"" + std::to_string(kCellPx) +
           "\" fill=\"" + fill + "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    }
  }

  for (std::size_t i = 0; i < paths.size(); ++i) {
    // draw each contiguous in-layer run as its own polyline
    std::string points;
    int run = 0;
    const auto flush = [&]() {
      if (run >= 2)
        s += "  <polyline points=\"" + points + "\" fill=\"none\" stroke=\"" +
             std::string(render_detail::stroke_for(i)) +
             "\" stroke-width=\"3\"/>\n";
      points.clear();
      run = 0;
    };
    for (const Cell& c : paths[i].cells) {
      if (c.z != layer) {
        flush();
        continue;
      }
      if (!points.empty()) points += " ";
      points += std::to_string(c.x * kCellPx + kCellPx / 2) + "," +
                std::to_string(c.y * kCellPx + kCellPx / 2);
      ++run;
    }
    flush();
  }

  if (grid.start().z == layer) {
    const int cx = grid.start().x * kCellPx + kCellPx / 2;
    const int cy = grid.start().y * kCellPx + kCellPx / 2;
    s += "  <circle cx=\"" + std::to_string(cx) + "\" cy=\"" +
         std::to_string(cy) +
         "\" r=\"7\" fill=\"none\" stroke=\"#000000\" stroke-width=\"3\"/>\n";
  }
  if (grid.poi() && grid.poi()->z == layer) {
    const int cx = grid.poi()->x * kCellPx + kCellPx / 2;
    const int cy = grid.poi()->y * kCellPx + kCellPx / 2;
    const int r = 8;
    s += "  <polygon points=\"" + std::to_string(cx) + "," +
         std::to_string(cy - r) + " " + std::to_string(cx + r) + "," +
         std::to_string(cy) + " " + std::to_string(cx) + "," +
         std::to_string(cy + r) + " " + std::to_string(cx - r) + "," +
         std::to_string(cy) +
         "\" fill=\"#f1c40f\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace riskplan
