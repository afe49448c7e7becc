#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kBin = RISKPLAN_CLI_BIN;
const std::string kDemoDir = RISKPLAN_DEMO_DIR;

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "riskplan_cli_test";
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, PlanWritesResultAndSvg) {
  const fs::path dir = temp_dir();
  const auto result = run("plan --map " + kDemoDir + "/cluttered.map --config " +
                          kDemoDir + "/config.json --mode approx --out " +
                          (dir / "r.json").string() + " --svg " +
                          (dir / "r.svg").string());
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(slurp(dir / "r.json").find("\"planner\""), std::string::npos);
  EXPECT_NE(slurp(dir / "r.svg").find("<svg"), std::string::npos);
}

TEST(Cli, RepeatedPlansAreByteIdentical) {
  const fs::path dir = temp_dir();
  for (const char* tag : {"a", "b"}) {
    const auto result = run("plan --map " + kDemoDir +
                            "/cluttered.map --config " + kDemoDir +
                            "/config.json --mode exact --out " +
                            (dir / (std::string("x") + tag + ".json")).string() +
                            " --svg " +
                            (dir / (std::string("x") + tag + ".svg")).string());
    EXPECT_EQ(result.exit_code, 0);
  }
  EXPECT_EQ(slurp(dir / "xa.json"), slurp(dir / "xb.json"));
  EXPECT_EQ(slurp(dir / "xa.svg"), slurp(dir / "xb.svg"));
}

TEST(Cli, ExitCodesFollowErrorKind) {
  const fs::path dir = temp_dir();
  // usage error: unknown subcommand
  EXPECT_NE(run("warp").exit_code, 0);
  // parse error: malformed map
  std::ofstream(dir / "bad.map") << "S.\nS.\n";
  EXPECT_EQ(run("plan --map " + (dir / "bad.map").string() + " --config " +
                kDemoDir + "/config.json")
                .exit_code,
            1);
  // invariant violation: bad gamma override
  EXPECT_EQ(run("plan --map " + kDemoDir + "/cluttered.map --config " +
                kDemoDir + "/config.json --gamma 2.0")
                .exit_code,
            2);
  // truncation: zero-path enumeration cap
  std::ofstream(dir / "tiny.json")
      << R"({"enumeration": {"max_paths": 0}})";
  const auto truncated =
      run("plan --map " + kDemoDir + "/cluttered.map --config " +
          (dir / "tiny.json").string() + " --mode exact --out " +
          (dir / "t.json").string());
  EXPECT_EQ(truncated.exit_code, 3);
  EXPECT_NE(slurp(dir / "t.json").find("\"truncated\": true"),
            std::string::npos);
}

TEST(Cli, CountPrintsDeterministicReport) {
  const auto a = run("count --map " + kDemoDir + "/corridor.map --config " +
                     kDemoDir + "/config.json");
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.stdout_text, "simple_paths_from_start: 4\ntruncated: false\n");
}

TEST(Cli, BenchWritesCsv) {
  const fs::path dir = temp_dir();
  const auto result = run("bench --trials 3 --seed 5 --out " +
                          (dir / "bench.csv").string());
  EXPECT_EQ(result.exit_code, 0);
  const std::string csv = slurp(dir / "bench.csv");
  EXPECT_NE(csv.find("# riskplan bench seed=5"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);  // 2 headers + 3 rows
}

TEST(Cli, RenderWritesSvg) {
  const auto result = run("render --map " + kDemoDir +
                          "/cluttered.map --config " + kDemoDir +
                          "/config.json --rewards SYNTH --out -");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.stdout_text.find("<svg"), std::string::npos);
}

TEST(Cli, DemoNegcyclePrintsCycle) {
  const auto result = run("demo-negcycle");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.stdout_text.find("negative cycle:"), std::string::npos);
}

}  // namespace
