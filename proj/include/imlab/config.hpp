#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imlab/ensemble.hpp"
#include "imlab/integrator.hpp"
#include "imlab/measure_lab.hpp"

namespace imlab {

enum class ExperimentKind { Simulate, Sweep, Ensemble, Verify };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);

/// Everything a run needs. Text form is a flat INI-like document:
///
///   [run]
///   kind = simulate
///   seed = 7
///   [model]
///   variant = sabra
///   truncation = 8
///
/// Every key is typed; unknown sections or keys are errors.
struct RunConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::string out_dir = "imlab_out";
  std::uint64_t seed = 0;
  bool strict = false;

  FDSystem system;
  IntegratorConfig integrator;

  // simulate
  double horizon = 1.0;
  std::vector<std::string> balance = {"x"};

  // sweep and the measures behind ensemble / statistical verify checks
  StationaryBudget budget;
  std::vector<double> sweep_alphas;
  std::vector<int> sweep_cutoffs;

  // ensemble
  EnsembleSpec ensemble;
  std::vector<int> ensemble_i = {2, 3, 4};
  /// 0 calibrates c_T on half of the reservoir.
  double ensemble_c_T = 0.0;

  // verify
  std::vector<std::string> checks = {"structure"};
  int structure_trials = 20;

  RunConfig();
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// One problem with a config document.
struct ConfigIssue {
  std::string path;
  std::string expected;
  std::string got;
};

/// Parses and validates; throws ConfigError listing every issue as
/// "path: expected X, got Y".
RunConfig parse_config(const std::string& text);
std::vector<ConfigIssue> config_issues(const std::string& text);
/// Full document with every default written out; parse_config inverts it.
std::string serialize_config(const RunConfig& cfg);
/// FNV-1a of the serialized config, output directory excluded.
std::uint64_t config_hash(const RunConfig& cfg);

/// Known verify check names.
const std::vector<std::string>& verify_check_names();

}  // namespace imlab
