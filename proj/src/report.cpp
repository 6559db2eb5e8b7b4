#include "imlab/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "imlab/errors.hpp"

namespace imlab {

int Report::exit_code(bool strict) const {
  for (const auto& v : verdicts) {
    if (v.status == Status::Fail) return 1;
    if (v.status == Status::Inconclusive && strict) return 1;
  }
  return 0;
}

nlohmann::ordered_json verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["check"] = v.check;
  j["paper_ref"] = v.paper_ref;
  j["target"] = v.target;
  j["estimate"] = v.estimate;
  j["stderr"] = v.std_error;
  j["tolerance"] = v.tolerance;
  j["status"] = to_string(v.status);
  j["pass"] = v.passed();
  j["detail"] = v.detail;
  return j;
}

nlohmann::ordered_json Report::to_json() const {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  nlohmann::ordered_json j;
  j["experiment"] = to_string(kind);
  j["config_hash"] = hash;
  j["config"] = config_text;
  j["provenance"] = {{"version", version}, {"seed", seed}, {"timestamp", timestamp}};
  auto& vs = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) vs.push_back(verdict_json(v));
  j["summary"] = summary;
  auto& ss = j["series"] = nlohmann::ordered_json::object();
  for (const auto& [name, s] : series) ss[name] = {{"columns", s.columns}, {"rows", s.rows}};
  return j;
}

void write_series_csv(const Series& s, const std::string& path) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t c = 0; c < s.columns.size(); ++c) out << (c ? "," : "") << s.columns[c];
  out << "\n";
  char buf[40];
  for (const auto& row : s.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_report(const Report& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / "report.json").string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << r.to_json().dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

std::vector<std::string> emit_plots_data(const Report& r, const std::string& dir) {
  struct Plot {
    const char* file;
    const char* series;
    std::vector<std::string> columns;
    ExperimentKind required_by;
  };
  const std::vector<Plot> plots{
      {"energy_vs_t.csv", "energy", {"t", "mean", "stderr"}, ExperimentKind::Simulate},
      {"balance_residual.csv", "balance/x", {"t", "mean", "stderr"}, ExperimentKind::Simulate},
      {"identity_z_vs_alpha.csv", "identity_sweep", {"alpha", "N", "estimate", "stderr", "target", "z"},
       ExperimentKind::Sweep},
      {"ensemble_complement_vs_i.csv", "ensemble_complement", {"i", "members", "total", "fraction"},
       ExperimentKind::Ensemble},
  };
  std::vector<std::string> written;
  const auto base = std::filesystem::path(dir) / "plots";
  for (const auto& p : plots) {
    auto it = r.series.find(p.series);
    Series s;
    if (it != r.series.end()) {
      s = it->second;
    } else if (r.kind == p.required_by && !(r.kind == ExperimentKind::Simulate && r.summary.value("alpha", 0.0) == 0.0 &&
                                            std::string(p.series) == "balance/x")) {
      throw DataError(std::string("report is missing the series '") + p.series + "'");
    } else {
      s.columns = p.columns;
    }
    const std::string path = (base / p.file).string();
    write_series_csv(s, path);
    written.push_back(path);
  }
  return written;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace imlab
