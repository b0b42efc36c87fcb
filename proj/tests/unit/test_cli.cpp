#include "gaussbv/cli/config.hpp"
#include "gaussbv/cli/experiments.hpp"
#include "gaussbv/cli/runner.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace gaussbv::cli;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run_tool(const std::string& args) {
  Run r;
  const std::string cmd = std::string(GAUSSBV_TOOL) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gaussbv_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Config, ParsesAllFields) {
  const auto c = ExperimentConfig::from_json(json::parse(R"({
    "experiment": "coarea", "dimension": 2, "level": 65, "quadrature": "gauss_hermite",
    "times": [0.1, 0.05], "levels": [-1, 0, 1], "radii": [0.5, 0.25], "seed": 9,
    "paths": 1000, "steps": 64, "output_dir": "out"})"));
  EXPECT_EQ(c.experiment, "coarea");
  EXPECT_EQ(*c.level, 65);
  EXPECT_EQ(c.times->size(), 2u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(*c.paths, 1000u);
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, RejectsInvalidInput) {
  for (const char* text : {R"([])", R"({})", R"({"experiment": "x", "bogus": 1})", R"({"experiment": 3})",
                           R"({"experiment": "x", "level": 64})", R"({"experiment": "x", "times": [0.1, 0.2]})",
                           R"({"experiment": "x", "times": []})", R"({"experiment": "x", "dimension": 4})",
                           R"({"experiment": "x", "quadrature": "simpson"})", R"({"experiment": "x", "paths": 5})"}) {
    EXPECT_THROW(ExperimentConfig::from_json(json::parse(text)), ConfigError) << text;
  }
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(Registry, EveryCriterionOnce) {
  std::set<int> seen;
  std::set<std::string> names;
  for (const auto& e : experiments()) {
    EXPECT_TRUE(names.insert(e.name).second) << e.name;
    if (e.criterion) EXPECT_TRUE(seen.insert(e.criterion).second) << e.criterion;
    EXPECT_EQ(find_experiment(e.name), &e);
  }
  EXPECT_EQ(seen.size(), 14u);
  EXPECT_EQ(*seen.begin(), 1);
  EXPECT_EQ(*seen.rbegin(), 14);
  EXPECT_EQ(find_experiment("nope"), nullptr);
}

TEST(Runner, UnknownExperimentIsConfigError) {
  ExperimentConfig c;
  c.experiment = "nope";
  std::ostringstream log;
  EXPECT_EQ(run_experiment(c, log).exit_code, kExitConfig);
}

TEST(Runner, ReportIsWrittenAndReproducible) {
  ExperimentConfig c;
  c.experiment = "slicing";
  c.output_dir = scratch("slicing").string();
  std::ostringstream log;
  const auto a = run_experiment(c, log);
  ASSERT_EQ(a.exit_code, kExitPass) << log.str();
  std::ifstream in(std::filesystem::path(c.output_dir) / "slicing.json");
  const json j = json::parse(in);
  EXPECT_EQ(j["experiment"], "slicing");
  EXPECT_TRUE(j.contains("wall_time"));
  c.write_files = false;
  const auto b = run_experiment(c, log);
  EXPECT_EQ(a.report->to_json("slicing", std::nullopt).dump(), b.report->to_json("slicing", std::nullopt).dump());
}

TEST(Tool, ListExitsZero) {
  const auto r = run_tool("list");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("tv-equivalence"), std::string::npos);
  EXPECT_NE(r.out.find("determinism"), std::string::npos);
}

TEST(Tool, PassingExperimentExitsZero) {
  const auto dir = scratch("pass");
  const auto r = run_tool("run --experiment density-classification --output-dir " + dir.string());
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "density-classification.json"));
}

TEST(Tool, ConfigFileRun) {
  const auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"experiment": "minkowski", "output_dir": ")" << scratch("cfgout").string() << R"("})";
  const auto r = run_tool("run " + cfg.string());
  EXPECT_EQ(r.status, 0) << r.out;
}

TEST(Tool, FailedCheckExitsOne) {
  // The box perimeters are not monotone in m.
  const auto r = run_tool("run --experiment box-divergence --output-dir " + scratch("fail").string());
  EXPECT_EQ(r.status, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL strictly_increasing"), std::string::npos);
}

TEST(Tool, NumericalFailureExitsOneAndNamesOperation) {
  // A 9-node grid cannot resolve the default time schedule.
  const auto r = run_tool("run --experiment tv-equivalence --level 9 --output-dir " + scratch("num").string());
  EXPECT_EQ(r.status, 1) << r.out;
  EXPECT_NE(r.out.find("numerical failure in"), std::string::npos) << r.out;
}

TEST(Tool, InvalidConfigExitsTwo) {
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << R"({"experiment": "coarea", "level": "big"})";
  EXPECT_EQ(run_tool("run " + bad.string()).status, 2);
  EXPECT_EQ(run_tool("run --experiment no-such-thing").status, 2);
  EXPECT_EQ(run_tool("run").status, 2);
  const auto garbage = scratch("garbage.json");
  std::ofstream(garbage) << "{not json";
  EXPECT_EQ(run_tool("run " + garbage.string()).status, 2);
}

TEST(Tool, ThreadCountDoesNotChangeResults) {
  const auto d1 = scratch("t1"), d2 = scratch("t2");
  ASSERT_EQ(run_tool("run --experiment rotation-invariance --seed 3 --output-dir " + d1.string()).status, 0);
  const std::string env = "GAUSSBV_THREADS=1 ";
  const std::string cmd = env + GAUSSBV_TOOL + " run --experiment rotation-invariance --seed 3 --output-dir " +
                          d2.string() + " >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  auto load = [](const std::filesystem::path& p) {
    std::ifstream in(p / "rotation-invariance.json");
    json j = json::parse(in);
    j.erase("wall_time");
    return j.dump();
  };
  EXPECT_EQ(load(d1), load(d2));
}
