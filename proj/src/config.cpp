#include "imlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "imlab/errors.hpp"

namespace imlab {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Ensemble: return "ensemble";
    case ExperimentKind::Verify: return "verify";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::Simulate, ExperimentKind::Sweep, ExperimentKind::Ensemble, ExperimentKind::Verify}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + name + "' (expected simulate, sweep, ensemble or verify)");
}

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{
      "structure", "conservation", "identity",   "balance",   "second_balance", "convergence",
      "ensemble",  "invariance",   "nondegeneracy", "histogram", "tail"};
  return names;
}

RunConfig::RunConfig() {
  system.model = ModelSpec::sabra(8);
  system.diss = DissipationSpec::linear_only();
  system.noise = NoiseSpec::exponential();
  system.alpha = 0.5;
  ensemble.diss = system.diss;
}

void RunConfig::validate() const {
  system.model.validate();
  system.diss.validate();
  system.noise.validate();
  integrator.validate();
  if (!(system.alpha >= 0.0) || system.alpha >= 1.0) throw DomainError("alpha must lie in [0, 1)");
  if (!(horizon > 0.0)) throw DomainError("simulate horizon must be > 0");
  budget.validate();
  if (kind == ExperimentKind::Sweep) {
    SweepPlan plan{sweep_alphas, sweep_cutoffs, budget};
    plan.validate();
  }
  if (kind == ExperimentKind::Ensemble) {
    EnsembleSpec e = ensemble;
    e.diss = system.diss;
    if (ensemble_c_T > 0.0) e.c_T = ensemble_c_T;
    e.validate();
    if (ensemble_i.empty()) throw DomainError("ensemble i list must be nonempty");
  }
  if (ensemble_c_T < 0.0) throw DomainError("ensemble c_T must be >= 0");
  for (const auto& c : checks) {
    const auto& names = verify_check_names();
    if (std::find(names.begin(), names.end(), c) == names.end()) throw DomainError("unknown verify check '" + c + "'");
  }
  if (structure_trials < 1) throw DomainError("structure trials must be >= 1");
  for (const auto& b : balance) {
    if (b != "x" && b != "x^2" && b != "const") throw DomainError("balance functions are x, x^2 or const");
  }
}

namespace {

// A typed key: how to print it from a config and how to store a parsed value.
struct Key {
  std::string section;
  std::string name;
  std::string expected;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;  // throws std::invalid_argument
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

double to_double(const std::string& s) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
  return x;
}

long long to_int(const std::string& s) {
  long long x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument(s);
  return x;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument(s);
  return x;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument(s);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out;
}

#define IMLAB_DOUBLE(sec, key, field)                                                          \
  Key { sec, key, "a real number", [](const RunConfig& c) { return fmt(c.field); },            \
        [](RunConfig& c, const std::string& v) { c.field = to_double(v); } }
#define IMLAB_INT(sec, key, field)                                                             \
  Key { sec, key, "an integer", [](const RunConfig& c) { return std::to_string(c.field); },    \
        [](RunConfig& c, const std::string& v) { c.field = static_cast<int>(to_int(v)); } }
#define IMLAB_BOOL(sec, key, field)                                                                  \
  Key { sec, key, "true or false", [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& v) { c.field = to_bool(v); } }

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      Key{"run", "kind", "simulate, sweep, ensemble or verify", [](const RunConfig& c) { return to_string(c.kind); },
          [](RunConfig& c, const std::string& v) {
            try {
              c.kind = parse_experiment(v);
            } catch (const ConfigError&) {
              throw std::invalid_argument(v);
            }
          }},
      Key{"run", "out", "a directory path", [](const RunConfig& c) { return c.out_dir; },
          [](RunConfig& c, const std::string& v) {
            if (v.empty()) throw std::invalid_argument(v);
            c.out_dir = v;
          }},
      Key{"run", "seed", "an unsigned 64-bit integer", [](const RunConfig& c) { return std::to_string(c.seed); },
          [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }},
      IMLAB_BOOL("run", "strict", strict),

      Key{"model", "variant", "euler2d, euler3d, gsqg, sabra or goy",
          [](const RunConfig& c) { return to_string(c.system.model.variant); },
          [](RunConfig& c, const std::string& v) {
            try {
              c.system.model.variant = parse_variant(v);
            } catch (const ConfigError&) {
              throw std::invalid_argument(v);
            }
          }},
      IMLAB_INT("model", "truncation", system.model.truncation),
      IMLAB_DOUBLE("model", "alpha_sqg", system.model.alpha_sqg),
      IMLAB_BOOL("model", "allow_singular", system.model.allow_singular),
      IMLAB_DOUBLE("model", "a", system.model.a),
      IMLAB_DOUBLE("model", "b", system.model.b),
      IMLAB_DOUBLE("model", "k0", system.model.shell.k0),
      IMLAB_DOUBLE("model", "lambda", system.model.shell.lambda),
      Key{"model", "coriolis", "three real numbers",
          [](const RunConfig& c) {
            return join(std::vector<double>(c.system.model.coriolis.begin(), c.system.model.coriolis.end()), fmt);
          },
          [](RunConfig& c, const std::string& v) {
            const auto items = split_list(v);
            if (items.size() != 3) throw std::invalid_argument(v);
            for (int i = 0; i < 3; ++i) c.system.model.coriolis[static_cast<std::size_t>(i)] = to_double(items[static_cast<std::size_t>(i)]);
          }},

      IMLAB_DOUBLE("dissipation", "s_star", system.diss.s_star),
      IMLAB_DOUBLE("dissipation", "s1_star", system.diss.s1_star),
      IMLAB_INT("dissipation", "q", system.diss.q),
      IMLAB_BOOL("dissipation", "a1", system.diss.a1),
      IMLAB_BOOL("dissipation", "a2", system.diss.a2),
      IMLAB_BOOL("dissipation", "a3", system.diss.a3),
      Key{"dissipation", "rho", "linear or affine_exp",
          [](const RunConfig& c) {
            return std::string(c.system.diss.rho.kind == RhoSpec::Kind::Linear ? "linear" : "affine_exp");
          },
          [](RunConfig& c, const std::string& v) {
            if (v == "linear") {
              c.system.diss.rho.kind = RhoSpec::Kind::Linear;
            } else if (v == "affine_exp") {
              c.system.diss.rho.kind = RhoSpec::Kind::AffineExp;
            } else {
              throw std::invalid_argument(v);
            }
          }},
      IMLAB_DOUBLE("dissipation", "rho_slope", system.diss.rho.slope),
      IMLAB_DOUBLE("dissipation", "rho_beta", system.diss.rho.beta),
      IMLAB_DOUBLE("dissipation", "rho_kappa", system.diss.rho.kappa),

      Key{"noise", "law", "exponential, algebraic or table",
          [](const RunConfig& c) {
            switch (c.system.noise.law) {
              case NoiseSpec::Law::Exponential: return std::string("exponential");
              case NoiseSpec::Law::Algebraic: return std::string("algebraic");
              case NoiseSpec::Law::Table: return std::string("table");
            }
            return std::string("?");
          },
          [](RunConfig& c, const std::string& v) {
            if (v == "exponential") {
              c.system.noise.law = NoiseSpec::Law::Exponential;
            } else if (v == "algebraic") {
              c.system.noise.law = NoiseSpec::Law::Algebraic;
            } else if (v == "table") {
              c.system.noise.law = NoiseSpec::Law::Table;
            } else {
              throw std::invalid_argument(v);
            }
          }},
      IMLAB_DOUBLE("noise", "amplitude", system.noise.amplitude),
      IMLAB_DOUBLE("noise", "gamma", system.noise.gamma),
      IMLAB_DOUBLE("noise", "power", system.noise.power),
      IMLAB_DOUBLE("noise", "scale", system.noise.scale),
      Key{"noise", "table", "a comma-separated list of reals",
          [](const RunConfig& c) { return join(c.system.noise.table, fmt); },
          [](RunConfig& c, const std::string& v) {
            c.system.noise.table.clear();
            for (const auto& s : split_list(v)) c.system.noise.table.push_back(to_double(s));
          }},
      Key{"noise", "polarization", "three real numbers",
          [](const RunConfig& c) {
            return join(std::vector<double>(c.system.noise.polarization.begin(), c.system.noise.polarization.end()),
                        fmt);
          },
          [](RunConfig& c, const std::string& v) {
            const auto items = split_list(v);
            if (items.size() != 3) throw std::invalid_argument(v);
            for (int i = 0; i < 3; ++i) c.system.noise.polarization[static_cast<std::size_t>(i)] = to_double(items[static_cast<std::size_t>(i)]);
          }},

      IMLAB_DOUBLE("dynamics", "alpha", system.alpha),
      IMLAB_DOUBLE("dynamics", "horizon", horizon),
      Key{"dynamics", "balance", "a list of x, x^2, const",
          [](const RunConfig& c) { return join(c.balance, [](const std::string& s) { return s; }); },
          [](RunConfig& c, const std::string& v) { c.balance = split_list(v); }},

      IMLAB_DOUBLE("integrator", "dt", integrator.dt),
      IMLAB_DOUBLE("integrator", "dt_max", integrator.dt_max),
      IMLAB_DOUBLE("integrator", "c_step", integrator.c_step),
      IMLAB_INT("integrator", "step_norm_index", integrator.step_norm_index),
      IMLAB_DOUBLE("integrator", "rtol", integrator.rtol),
      IMLAB_DOUBLE("integrator", "atol", integrator.atol),
      IMLAB_INT("integrator", "record_every", integrator.record_every),
      IMLAB_INT("integrator", "paths", integrator.paths),

      IMLAB_INT("measure", "paths", budget.paths),
      IMLAB_DOUBLE("measure", "horizon", budget.horizon),
      IMLAB_DOUBLE("measure", "burn_in_fraction", budget.burn_in_fraction),
      IMLAB_INT("measure", "batches", budget.batches),
      Key{"measure", "reservoir", "a nonnegative integer",
          [](const RunConfig& c) { return std::to_string(c.budget.reservoir); },
          [](RunConfig& c, const std::string& v) { c.budget.reservoir = static_cast<std::size_t>(to_u64(v)); }},

      Key{"sweep", "alphas", "a comma-separated list of reals",
          [](const RunConfig& c) { return join(c.sweep_alphas, fmt); },
          [](RunConfig& c, const std::string& v) {
            c.sweep_alphas.clear();
            for (const auto& s : split_list(v)) c.sweep_alphas.push_back(to_double(s));
          }},
      Key{"sweep", "cutoffs", "a comma-separated list of integers",
          [](const RunConfig& c) { return join(c.sweep_cutoffs, [](int n) { return std::to_string(n); }); },
          [](RunConfig& c, const std::string& v) {
            c.sweep_cutoffs.clear();
            for (const auto& s : split_list(v)) c.sweep_cutoffs.push_back(static_cast<int>(to_int(s)));
          }},

      IMLAB_INT("ensemble", "i", ensemble.i),
      IMLAB_INT("ensemble", "j_max", ensemble.j),
      IMLAB_DOUBLE("ensemble", "r", ensemble.r),
      IMLAB_DOUBLE("ensemble", "c_T", ensemble_c_T),
      Key{"ensemble", "i_list", "a comma-separated list of integers",
          [](const RunConfig& c) { return join(c.ensemble_i, [](int n) { return std::to_string(n); }); },
          [](RunConfig& c, const std::string& v) {
            c.ensemble_i.clear();
            for (const auto& s : split_list(v)) c.ensemble_i.push_back(static_cast<int>(to_int(s)));
          }},

      Key{"verify", "checks", "a list of check names",
          [](const RunConfig& c) { return join(c.checks, [](const std::string& s) { return s; }); },
          [](RunConfig& c, const std::string& v) { c.checks = split_list(v); }},
      IMLAB_INT("verify", "structure_trials", structure_trials),
  };
  return table;
}

#undef IMLAB_DOUBLE
#undef IMLAB_INT
#undef IMLAB_BOOL

struct Parsed {
  RunConfig cfg;
  std::vector<ConfigIssue> issues;
};

Parsed parse(const std::string& text) {
  Parsed out;
  std::map<std::string, const Key*> index;
  std::set<std::string> sections;
  for (const auto& k : keys()) {
    index[k.section + "." + k.name] = &k;
    sections.insert(k.section);
  }
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        out.issues.push_back({where, "[section]", line});
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) out.issues.push_back({section, "a known section", "unknown section"});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      out.issues.push_back({where, "key = value", line});
      continue;
    }
    const std::string path = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = index.find(path);
    if (section.empty() || it == index.end()) {
      out.issues.push_back({path, "a known key", "unknown key"});
      continue;
    }
    if (!seen.insert(path).second) {
      out.issues.push_back({path, "a single assignment", "duplicate key"});
      continue;
    }
    try {
      it->second->set(out.cfg, value);
    } catch (const std::exception&) {
      out.issues.push_back({path, it->second->expected, "'" + value + "'"});
    }
  }
  out.cfg.ensemble.diss = out.cfg.system.diss;
  out.cfg.integrator.seed = out.cfg.seed;
  if (out.issues.empty()) {
    try {
      out.cfg.validate();
    } catch (const Error& e) {
      out.issues.push_back({"(validation)", "a consistent config", e.what()});
    }
  }
  return out;
}

}  // namespace

std::vector<ConfigIssue> config_issues(const std::string& text) { return parse(text).issues; }

RunConfig parse_config(const std::string& text) {
  Parsed p = parse(text);
  if (!p.issues.empty()) {
    std::string msg = "invalid config:";
    for (const auto& i : p.issues) msg += "\n  " + i.path + ": expected " + i.expected + ", got " + i.got;
    throw ConfigError(msg);
  }
  return p.cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // Where the artifacts go does not change what is computed.
  RunConfig copy = cfg;
  copy.out_dir = "-";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(copy)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace imlab
