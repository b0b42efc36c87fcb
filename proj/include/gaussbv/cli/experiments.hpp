#pragma once

#include "gaussbv/cli/config.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gaussbv::cli {

struct Report {
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, bool>> pass_flags;
  std::vector<std::pair<std::string, std::string>> artifacts;  // name, CSV text

  void flag(const std::string& name, bool pass) { pass_flags.emplace_back(name, pass); }
  bool all_pass() const;
  /// {experiment, inputs, values, pass_flags[, wall_time]}.
  nlohmann::ordered_json to_json(const std::string& experiment, std::optional<double> wall_time) const;
};

struct Experiment {
  std::string name;
  std::string description;
  int criterion = 0;  // acceptance criterion number, 0 for extras
  std::function<Report(const ExperimentConfig&)> run;
};

/// Registry in stable order.
const std::vector<Experiment>& experiments();
const Experiment* find_experiment(const std::string& name);

}  // namespace gaussbv::cli
