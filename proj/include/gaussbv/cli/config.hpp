#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaussbv::cli {

/// Invalid or unreadable configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment invocation. Absent optional fields take the experiment's
/// defaults; unknown JSON keys are rejected.
struct ExperimentConfig {
  std::string experiment;
  std::optional<int> dimension;
  std::optional<int> level;             // nodes per grid axis
  std::optional<std::string> quadrature;  // "uniform_truncated" or "gauss_hermite"
  std::optional<std::vector<double>> times;
  std::optional<std::vector<double>> levels;
  std::optional<std::vector<double>> radii;
  std::uint64_t seed = 0;
  std::optional<std::size_t> paths;
  std::optional<std::size_t> steps;
  std::string output_dir = ".";
  bool write_files = true;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

}  // namespace gaussbv::cli
