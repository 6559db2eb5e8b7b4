#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "imlab/config.hpp"
#include "imlab/verdict.hpp"

namespace imlab {

/// A named table of numbers, written as CSV with 17 significant digits.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::uint64_t config_hash = 0;
  std::string config_text;
  std::uint64_t seed = 0;
  std::string version = "0.1.0";
  std::string timestamp;
  std::vector<Verdict> verdicts;
  std::map<std::string, Series> series;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  /// 0 when every verdict passes; inconclusive verdicts count as failures
  /// only when strict.
  int exit_code(bool strict) const;
  nlohmann::ordered_json to_json() const;
};

nlohmann::ordered_json verdict_json(const Verdict& v);

void write_series_csv(const Series& s, const std::string& path);
/// report.json in `dir`.
void write_report(const Report& r, const std::string& dir);

/// Plot-ready files under dir/plots: energy_vs_t.csv, balance_residual.csv,
/// identity_z_vs_alpha.csv and ensemble_complement_vs_i.csv. Series the run
/// kind must produce raise DataError when missing; the others are written as
/// header-only files.
std::vector<std::string> emit_plots_data(const Report& r, const std::string& dir);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace imlab
