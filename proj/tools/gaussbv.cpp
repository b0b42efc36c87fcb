#include "gaussbv/cli/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace gaussbv::cli;
  CLI::App app{"Gaussian BV experiment runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list registered experiments");
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config or by name");
  std::string config_path;
  std::string name;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::string output_dir;
  run->add_option("config", config_path, "JSON config file");
  run->add_option("--experiment", name, "experiment name");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--level", level, "nodes per grid axis");
  run->add_option("--output-dir", output_dir, "directory for the report and CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (*list) {
    list_experiments(std::cout);
    return kExitPass;
  }

  ExperimentConfig config;
  try {
    if (config_path.empty() == name.empty()) {
      throw ConfigError("give either a config file or --experiment, not both");
    }
    if (!config_path.empty()) {
      config = ExperimentConfig::load(config_path);
    } else {
      nlohmann::json j{{"experiment", name}};
      if (seed) j["seed"] = *seed;
      if (level) j["level"] = *level;
      config = ExperimentConfig::from_json(j);
    }
    if (!config_path.empty() && (seed || level)) {
      if (seed) config.seed = *seed;
      if (level) {
        nlohmann::json j{{"experiment", config.experiment}, {"level", *level}};
        config.level = ExperimentConfig::from_json(j).level;
      }
    }
    if (!output_dir.empty()) config.output_dir = output_dir;
  } catch (const ConfigError& e) {
    std::cerr << "gaussbv: invalid config: " << e.what() << '\n';
    return kExitConfig;
  }
  return run_experiment(config, std::cerr).exit_code;
}
