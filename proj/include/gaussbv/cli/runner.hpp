#pragma once

#include "gaussbv/cli/config.hpp"
#include "gaussbv/cli/experiments.hpp"

#include <iosfwd>

namespace gaussbv::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2 };

struct RunOutcome {
  int exit_code = kExitFail;
  std::optional<Report> report;
  double wall_time = 0.0;
};

/// Runs one experiment, writes `<output_dir>/<name>.json` and the CSV
/// artifacts when write_files is set, and reports progress on `log`.
RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log);

void list_experiments(std::ostream& out);

}  // namespace gaussbv::cli
