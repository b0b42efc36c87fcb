#include "gaussbv/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace gaussbv::cli {

namespace {

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

std::vector<double> schedule(const nlohmann::json& j, const char* key, bool decreasing) {
  auto v = get_as<std::vector<double>>(j, key);
  if (v.empty()) throw ConfigError(std::string("config: '") + key + "' must not be empty");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) throw ConfigError(std::string("config: '") + key + "' must be finite");
    if (decreasing && !(v[k] > 0.0)) throw ConfigError(std::string("config: '") + key + "' must be positive");
    if (k > 0 && decreasing && !(v[k] < v[k - 1])) {
      throw ConfigError(std::string("config: '") + key + "' must be strictly decreasing");
    }
    if (k > 0 && !decreasing && !(v[k] > v[k - 1])) {
      throw ConfigError(std::string("config: '") + key + "' must be strictly increasing");
    }
  }
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  static const std::set<std::string> known{"experiment", "dimension", "level", "quadrature",
                                           "times",      "levels",    "radii", "seed",
                                           "paths",      "steps",     "output_dir"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");
  }
  if (!j.contains("experiment")) throw ConfigError("config: missing 'experiment'");
  ExperimentConfig c;
  c.experiment = get_as<std::string>(j, "experiment");
  if (j.contains("dimension")) {
    c.dimension = get_as<int>(j, "dimension");
    if (*c.dimension < 1 || *c.dimension > 3) throw ConfigError("config: 'dimension' must be 1, 2 or 3");
  }
  if (j.contains("level")) {
    c.level = get_as<int>(j, "level");
    if (*c.level < 9 || *c.level > 1025 || *c.level % 2 == 0) {
      throw ConfigError("config: 'level' must be an odd node count in [9, 1025]");
    }
  }
  if (j.contains("quadrature")) {
    c.quadrature = get_as<std::string>(j, "quadrature");
    if (*c.quadrature != "uniform_truncated" && *c.quadrature != "gauss_hermite") {
      throw ConfigError("config: 'quadrature' must be uniform_truncated or gauss_hermite");
    }
  }
  if (j.contains("times")) c.times = schedule(j, "times", true);
  if (j.contains("radii")) c.radii = schedule(j, "radii", true);
  if (j.contains("levels")) c.levels = schedule(j, "levels", false);
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("paths")) {
    c.paths = get_as<std::size_t>(j, "paths");
    if (*c.paths < 100) throw ConfigError("config: 'paths' must be at least 100");
  }
  if (j.contains("steps")) {
    c.steps = get_as<std::size_t>(j, "steps");
    if (*c.steps < 2) throw ConfigError("config: 'steps' must be at least 2");
  }
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_json(j);
}

}  // namespace gaussbv::cli
