// Acceptance suite: one line per criterion, `AC<k> <name>: PASS|FAIL`.
// With no argument every criterion runs; with a number only that one.
#include "gaussbv/cli/experiments.hpp"
#include "gaussbv/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

using namespace gaussbv::cli;

namespace {

bool run_criterion(const Experiment& e) {
  ExperimentConfig config;
  config.experiment = e.name;
  config.write_files = false;
  bool pass = false;
  std::string detail;
  try {
    const Report r = e.run(config);
    pass = r.all_pass();
    for (const auto& [name, ok] : r.pass_flags) {
      if (!ok) detail += (detail.empty() ? "failed: " : ", ") + name;
    }
  } catch (const std::exception& ex) {
    detail = std::string("error: ") + ex.what();
  }
  std::printf("AC%d %s: %s%s%s\n", e.criterion, e.name.c_str(), pass ? "PASS" : "FAIL",
              detail.empty() ? "" : " (", detail.empty() ? "" : (detail + ")").c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all = true;
  int ran = 0;
  for (const auto& e : experiments()) {
    if (e.criterion == 0 || (only != 0 && e.criterion != only)) continue;
    all = run_criterion(e) && all;
    ++ran;
  }
  if (ran == 0) {
    std::fprintf(stderr, "acceptance: no criterion %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
