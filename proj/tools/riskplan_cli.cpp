// riskplan command-line front end.
//
// Subcommands: plan | count | bench | render | demo-negcycle
// Exit codes:  0 ok, 1 usage or parse error, 2 invariant violation,
//              3 truncated enumeration (plan/count; the result is still written)

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "riskplan/riskplan.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw riskplan::ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw riskplan::ParseError("cannot open output file: " + path);
  out << data;
}

riskplan::RewardsSpec rewards_spec_from_flag(const std::string& flag) {
  if (flag == "SYNTH") return {riskplan::RewardsSpec::Kind::Synth, ""};
  return {riskplan::RewardsSpec::Kind::Csv, read_file(flag)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-aware, reward-maximizing path planning on occupancy grids"};
  app.require_subcommand(1);

  std::string map_path, config_path, out_path = "-";
  std::string rewards_flag = "SYNTH";
  std::string mode_flag = "approx";
  std::string svg_path;
  std::optional<double> gamma;
  int layer = -1;

  auto* plan = app.add_subcommand("plan", "plan a path and write a result file");
  plan->add_option("--map", map_path, "map file")->required();
  plan->add_option("--config", config_path, "config file (JSON)")->required();
  plan->add_option("--rewards", rewards_flag,
                   "reward CSV path, or SYNTH for the synthetic field");
  plan->add_option("--mode", mode_flag, "exact | approx")
      ->check(CLI::IsMember({"exact", "approx"}));
  plan->add_option("--gamma", gamma, "discount factor override");
  plan->add_option("--out", out_path, "result path ('-' = stdout)");
  plan->add_option("--svg", svg_path, "also render the plan to this SVG file");
  plan->add_option("--layer", layer, "layer to render for 3-D maps");

  auto* count = app.add_subcommand("count", "count simple paths from the start");
  count->add_option("--map", map_path, "map file")->required();
  count->add_option("--config", config_path, "config file (JSON)")->required();

  int trials = 50;
  std::uint64_t seed = 1;
  riskplan::RandomInstanceSpec inst;
  auto* bench = app.add_subcommand(
      "bench", "randomized exact-vs-approximate benchmark (CSV)");
  bench->add_option("--trials", trials, "number of random instances");
  bench->add_option("--seed", seed, "RNG seed recorded in the CSV header");
  bench->add_option("--max-width", inst.max_width, "max grid width");
  bench->add_option("--max-height", inst.max_height, "max grid height");
  bench->add_option("--density", inst.obstacle_density, "obstacle density");
  bench->add_option("--out", out_path, "CSV path ('-' = stdout)");

  auto* render = app.add_subcommand("render", "render a map (and rewards) to SVG");
  render->add_option("--map", map_path, "map file")->required();
  render->add_option("--config", config_path, "config file (JSON)")->required();
  std::string render_rewards;
  render->add_option("--rewards", render_rewards,
                     "reward CSV path, SYNTH, or omit for a blank background");
  render->add_option("--layer", layer, "layer to render for 3-D maps");
  render->add_option("--out", out_path, "SVG path ('-' = stdout)");

  auto* demo = app.add_subcommand(
      "demo-negcycle",
      "show why relaxation search fails: a walk whose utility conversion "
      "yields a negative cycle");
  (void)demo;

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      const auto mode = mode_flag == "exact" ? riskplan::PlanMode::Exact
                                             : riskplan::PlanMode::Approximate;
      const auto outputs = riskplan::cmd_plan(
          read_file(map_path), read_file(config_path),
          rewards_spec_from_flag(rewards_flag), mode, gamma, !svg_path.empty(),
          layer);
      write_output(out_path, outputs.result_json);
      if (outputs.svg) write_output(svg_path, *outputs.svg);
      return outputs.truncated ? 3 : 0;
    }
    if (count->parsed()) {
      const auto outputs =
          riskplan::cmd_count(read_file(map_path), read_file(config_path));
      std::cout << outputs.report;
      std::cerr << "elapsed_seconds: " << outputs.elapsed_seconds << "\n";
      return outputs.truncated ? 3 : 0;
    }
    if (bench->parsed()) {
      riskplan::BenchSpec spec{trials, seed, inst};
      write_output(out_path, riskplan::cmd_bench(spec));
      return 0;
    }
    if (render->parsed()) {
      std::optional<riskplan::RewardsSpec> rw;
      if (!render_rewards.empty())
        rw = rewards_spec_from_flag(render_rewards);
      write_output(out_path,
                   riskplan::cmd_render(read_file(map_path),
                                        read_file(config_path), rw, layer));
      return 0;
    }
    if (demo->parsed()) {
      std::cout << riskplan::demo_negative_cycle();
      return 0;
    }
  } catch (const riskplan::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const riskplan::InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
