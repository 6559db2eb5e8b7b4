#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#include "imlab/config.hpp"
#include "imlab/errors.hpp"
#include "imlab/report.hpp"
#include "imlab/runner.hpp"

using namespace imlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("imlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(IMLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("a minimal config takes defaults for everything else") {
  const RunConfig c = parse_config("[model]\nvariant = goy\ntruncation = 10\n\n# comment\n[dynamics]\nalpha = 0.25\n");
  CHECK(c.system.model.variant == ModelVariant::GOY);
  CHECK(c.system.model.truncation == 10);
  CHECK(c.system.alpha == 0.25);
  CHECK(c.kind == ExperimentKind::Simulate);
  CHECK(parse_config("") == RunConfig{});
}

TEST_CASE("an odd dissipation exponent is rejected") {
  try {
    parse_config("[dissipation]\nq = 5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("even") != std::string::npos);
  }
}

TEST_CASE("every issue in a document is reported") {
  const auto issues = config_issues("[model]\ntruncation = eight\ncolour = red\n[bogus]\n[dynamics]\nalpha = 0.1\nalpha = 0.2\n");
  REQUIRE(issues.size() == 4);
  CHECK(issues[0].path == "model.truncation");
  CHECK(issues[0].got == "'eight'");
  CHECK(issues[1].path == "model.colour");
  CHECK(issues[2].path == "bogus");
  CHECK(issues[3].got == "duplicate key");
  CHECK_THROWS_AS(parse_config("[model]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = 0.1\n"), ConfigError);
}

TEST_CASE("serialize and parse round trip") {
  RunConfig c;
  c.kind = ExperimentKind::Sweep;
  c.seed = 18446744073709551615ull;
  c.system.alpha = 0.1234567890123456789;
  c.system.noise.law = NoiseSpec::Law::Table;
  c.system.noise.table = {0.1, 1.0 / 3.0, 2e-17};
  c.sweep_alphas = {0.5, 0.25};
  c.sweep_cutoffs = {6, 8};
  c.checks = {"structure", "tail"};
  c.out_dir = "some/where";
  // Parsing derives these two from the run seed and the dissipation section.
  c.integrator.seed = c.seed;
  c.ensemble.diss = c.system.diss;
  const std::string text = serialize_config(c);
  const RunConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
}

TEST_CASE("config hash ignores the output directory only") {
  RunConfig a;
  RunConfig b = a;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("verify structure writes a passing report and header-only plots") {
  RunConfig c;
  c.kind = ExperimentKind::Verify;
  c.checks = {"structure"};
  c.structure_trials = 3;
  c.out_dir = scratch("verify").string();
  const RunOutcome out = run(c);
  CHECK(out.exit_code == 0);
  CHECK_FALSE(out.report.verdicts.empty());
  for (const auto& v : out.report.verdicts) CHECK(v.passed());

  const auto j = nlohmann::json::parse(slurp(fs::path(c.out_dir) / "report.json"));
  CHECK(j["experiment"] == "verify");
  CHECK(j["verdicts"].size() == out.report.verdicts.size());
  for (const char* key : {"config_hash", "config", "provenance", "summary", "series"}) CHECK(j.contains(key));
  CHECK(j["verdicts"][0].contains("stderr"));
  CHECK(j["provenance"]["seed"] == 0);
  CHECK(parse_config(j["config"].get<std::string>()) == parse_config(serialize_config(c)));

  const std::string energy = slurp(fs::path(c.out_dir) / "plots" / "energy_vs_t.csv");
  CHECK(std::count(energy.begin(), energy.end(), '\n') == 1);
  fs::remove_all(c.out_dir);
}

TEST_CASE("simulate emits energy and balance series that match the verdicts") {
  RunConfig c;
  c.system.model = ModelSpec::sabra(6);
  c.horizon = 0.2;
  c.integrator.paths = 3;
  c.integrator.record_every = 10;
  c.balance = {"x", "const"};
  c.out_dir = scratch("simulate").string();
  const RunOutcome out = run(c);
  const Report& r = out.report;
  REQUIRE(r.series.count("energy"));
  CHECK(r.series.at("energy").rows.size() == 21);
  for (const std::string f : {"x", "const"}) {
    CHECK(r.series.count("balance/" + f));
    bool found = false;
    for (const auto& v : r.verdicts) found = found || v.check == "ito_balance/" + f;
    CHECK(found);
  }
  for (int p = 0; p < 3; ++p) CHECK(fs::exists(fs::path(c.out_dir) / "paths" / ("path_" + std::to_string(p) + ".csv")));
  CHECK(fs::exists(fs::path(c.out_dir) / "final_states.imlb"));
  const std::string balance = slurp(fs::path(c.out_dir) / "plots" / "balance_residual.csv");
  CHECK(std::count(balance.begin(), balance.end(), '\n') == 22);
  fs::remove_all(c.out_dir);
}

TEST_CASE("missing required series is a data error") {
  Report r;
  r.kind = ExperimentKind::Sweep;
  CHECK_THROWS_AS(emit_plots_data(r, scratch("plots").string()), DataError);
  fs::remove_all(scratch("plots"));
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(cli("verify structure --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(cli("") == 2);
  CHECK(cli("verify no_such_check --out " + dir.string()) == 2);
  CHECK(cli("simulate --paths 0") == 2);
  CHECK(cli("simulate --config /nonexistent.ini") == 2);
  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << "[dissipation]\nq = 3\n";
  CHECK(cli("simulate --config " + bad.string()) == 2);
  fs::remove_all(dir);
}
