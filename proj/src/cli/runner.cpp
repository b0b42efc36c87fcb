#include "gaussbv/cli/runner.hpp"

#include "gaussbv/errors.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace gaussbv::cli {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log) {
  RunOutcome outcome;
  const Experiment* e = find_experiment(config.experiment);
  if (!e) {
    log << "gaussbv: unknown experiment '" << config.experiment << "' (see `gaussbv list`)\n";
    outcome.exit_code = kExitConfig;
    return outcome;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    outcome.report = e->run(config);
  } catch (const ConfigError& err) {
    log << "gaussbv: invalid config: " << err.what() << '\n';
    outcome.exit_code = kExitConfig;
    return outcome;
  } catch (const ConvergenceError& err) {
    log << "gaussbv: " << e->name << ": numerical failure in " << err.what() << " (last residual "
        << err.last_residual() << ")\n";
    outcome.exit_code = kExitFail;
    return outcome;
  } catch (const Error& err) {
    log << "gaussbv: " << e->name << ": numerical failure in " << err.what() << '\n';
    outcome.exit_code = kExitFail;
    return outcome;
  }
  outcome.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Report& report = *outcome.report;

  if (config.write_files) {
    std::error_code ec;
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      log << "gaussbv: invalid config: cannot create " << dir << ": " << ec.message() << '\n';
      outcome.exit_code = kExitConfig;
      return outcome;
    }
    try {
      write_text(dir / (e->name + ".json"), report.to_json(e->name, outcome.wall_time).dump(2) + "\n");
      for (const auto& [name, body] : report.artifacts) write_text(dir / name, body);
    } catch (const ConfigError& err) {
      log << "gaussbv: invalid config: " << err.what() << '\n';
      outcome.exit_code = kExitConfig;
      return outcome;
    }
  }

  for (const auto& [name, pass] : report.pass_flags) {
    log << "  " << (pass ? "pass " : "FAIL ") << name << '\n';
  }
  outcome.exit_code = report.all_pass() ? kExitPass : kExitFail;
  log << e->name << ": " << (outcome.exit_code == kExitPass ? "all checks passed" : "checks failed") << " in "
      << std::fixed << std::setprecision(2) << outcome.wall_time << " s\n";
  log.unsetf(std::ios::floatfield);
  return outcome;
}

void list_experiments(std::ostream& out) {
  for (const auto& e : experiments()) {
    out << std::left << std::setw(26) << e.name << e.description << '\n';
  }
}

}  // namespace gaussbv::cli
