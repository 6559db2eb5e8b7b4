#pragma once

#include <string>
#include <vector>

#include "imlab/config.hpp"
#include "imlab/report.hpp"

namespace imlab {

struct RunOutcome {
  Report report;
  int exit_code = 0;
  std::vector<std::string> artifacts;
};

/// Executes the experiment, writes its artifacts and report.json under
/// cfg.out_dir and returns the report. Numeric outputs depend only on
/// (cfg, cfg.seed).
RunOutcome run(const RunConfig& cfg);

/// Verify checks on their own, for callers that want the verdicts without
/// touching disk.
std::vector<Verdict> run_verify_checks(const RunConfig& cfg, Report& report);

}  // namespace imlab
