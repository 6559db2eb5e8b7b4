#include "imlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "imlab/errors.hpp"
#include "imlab/parallel.hpp"
#include "imlab/snapshot_io.hpp"
#include "imlab/spectral_ops.hpp"
#include "imlab/statistics.hpp"

namespace imlab {

namespace fs = std::filesystem;

namespace {

BalanceFunction balance_by_name(const std::string& name) {
  if (name == "x") return BalanceFunction::identity();
  if (name == "x^2") return BalanceFunction::power(2);
  if (name == "const") return BalanceFunction::constant(1.0);
  throw ConfigError("unknown balance function '" + name + "'");
}

std::string series_key(const std::string& name) { return "balance/" + name; }

Verdict bool_verdict(std::string check, std::string ref, bool ok, std::string detail, double estimate = 0.0,
                     double target = 0.0) {
  Verdict v;
  v.check = std::move(check);
  v.paper_ref = std::move(ref);
  v.status = ok ? Status::Pass : Status::Fail;
  v.detail = std::move(detail);
  v.estimate = estimate;
  v.target = target;
  return v;
}

IntegratorConfig seeded(const RunConfig& cfg) {
  IntegratorConfig ic = cfg.integrator;
  ic.seed = cfg.seed;
  return ic;
}

// Stochastic paths with balance sums; shared by simulate and the balance check.
std::vector<FlowResult> run_paths(const FDSystem& sys, const IntegratorConfig& ic, double horizon, int paths,
                                  const std::vector<BalanceFunction>& balance, std::vector<std::mt19937_64>* rngs) {
  std::vector<FlowResult> out(static_cast<std::size_t>(paths));
  if (rngs) rngs->assign(static_cast<std::size_t>(paths), std::mt19937_64());
  PathOptions opts;
  opts.balance = balance;
  const SpectralField u0 = sys.model.state_space();
  parallel_for(paths, [&](int p) {
    std::mt19937_64 rng(stream_seed(ic.seed, static_cast<std::uint64_t>(p)));
    out[static_cast<std::size_t>(p)] = stochastic_path(sys, u0, 0.0, horizon, ic, rng, opts);
    out[static_cast<std::size_t>(p)].record.stream = static_cast<std::uint64_t>(p);
    if (rngs) (*rngs)[static_cast<std::size_t>(p)] = rng;
  });
  return out;
}

Series balance_series(const BalanceSeries& b) {
  Series s;
  s.columns = {"t", "mean", "stderr"};
  for (std::size_t k = 0; k < b.t.size(); ++k) s.rows.push_back({b.t[k], b.mean[k], b.std_error[k]});
  return s;
}

// --- simulate ------------------------------------------------------------------

void simulate(const RunConfig& cfg, Report& report, std::vector<std::string>& artifacts) {
  const IntegratorConfig ic = seeded(cfg);
  const fs::path dir(cfg.out_dir);
  const FDSystem& sys = cfg.system;
  report.summary["alpha"] = sys.alpha;
  report.summary["dt"] = ic.dt;
  report.summary["M"] = ic.paths;

  if (sys.alpha == 0.0) {
    std::mt19937_64 rng(stream_seed(cfg.seed, 0));
    const SpectralField u0 = random_field(sys.model.state_space(), rng);
    FlowOptions fo;
    const int samples = 100;
    for (int k = 0; k < samples; ++k) fo.output_times.push_back(cfg.horizon * k / samples);
    fo.output_times.push_back(cfg.horizon);
    const FlowResult run = deterministic_flow(sys.model, u0, 0.0, cfg.horizon, ic, fo);
    Series energy{{"t", "mean", "stderr"}, {}};
    const auto& e = run.record.at("l2sq");
    for (std::size_t k = 0; k < e.size(); ++k) energy.rows.push_back({run.record.times[k], e[k], 0.0});
    report.series["energy"] = energy;
    report.verdicts.push_back(gate("energy_conservation", "the Galerkin flow conserves |u|^2", e.front(), e.back(), 0.0,
                                   0.0, 1e-6, 1e-15));
    const std::string snap = (dir / "final_state.imlb").string();
    save_snapshot(snap, run.final_state);
    artifacts.push_back(snap);
    report.summary["final_l2sq"] = e.back();
    return;
  }

  std::vector<BalanceFunction> balance;
  for (const auto& name : cfg.balance) balance.push_back(balance_by_name(name));
  std::vector<std::mt19937_64> rngs;
  const std::vector<FlowResult> runs = run_paths(sys, ic, cfg.horizon, ic.paths, balance, &rngs);

  std::vector<TrajectoryRecord> records;
  std::vector<SpectralField> finals;
  for (std::size_t p = 0; p < runs.size(); ++p) {
    const TrajectoryRecord& rec = runs[p].record;
    records.push_back(rec);
    finals.push_back(runs[p].final_state);
    Series s;
    s.columns.push_back("t");
    for (const auto& [name, v] : rec.series) s.columns.push_back(name);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      std::vector<double> row{rec.times[k]};
      for (const auto& [name, v] : rec.series) row.push_back(v[k]);
      s.rows.push_back(std::move(row));
    }
    const std::string csv = (dir / "paths" / ("path_" + std::to_string(p) + ".csv")).string();
    write_series_csv(s, csv);
    artifacts.push_back(csv);
    const std::string ckpt = (dir / "checkpoints" / ("path_" + std::to_string(p) + ".ckpt")).string();
    fs::create_directories(fs::path(ckpt).parent_path());
    save_checkpoint(ckpt, {runs[p].final_state, cfg.horizon, rngs[p]});
    artifacts.push_back(ckpt);
  }
  const std::string snaps = (dir / "final_states.imlb").string();
  save_snapshots(snaps, finals);
  artifacts.push_back(snaps);

  // Ensemble energy curve.
  Series energy{{"t", "mean", "stderr"}, {}};
  const auto& times = records.front().times;
  for (std::size_t k = 0; k < times.size(); ++k) {
    RunningStats st;
    for (const auto& r : records) st.push(r.at("l2sq")[k]);
    energy.rows.push_back({times[k], st.mean(), st.stderr_of_mean()});
  }
  report.series["energy"] = energy;
  report.summary["final_l2sq"] = {{"mean", energy.rows.back()[1]}, {"stderr", energy.rows.back()[2]}};

  const double A0N = NoiseModel(sys.noise, sys.model.state_space()).total_variance();
  report.summary["A0N"] = A0N;
  for (const auto& F : balance) {
    const BalanceSeries b = ito_balance_residual(F, records, sys.alpha, A0N);
    report.series[series_key(F.name)] = balance_series(b);
    Verdict v;
    v.check = "ito_balance/" + F.name;
    v.paper_ref = "Ito balance for F(|u|^2)";
    v.target = 0.0;
    v.estimate = b.mean.back();
    v.std_error = b.std_error.back();
    v.tolerance = 0.05 * b.scale.back() + 3.0 * v.std_error + 1e-14;
    v.status = std::abs(v.estimate) <= v.tolerance ? Status::Pass : Status::Fail;
    v.detail = "final-time residual against 5% of the largest balance term plus 3 sigma";
    report.verdicts.push_back(v);
  }
}

// --- sweep ---------------------------------------------------------------------

void run_sweep(const RunConfig& cfg, Report& report, std::vector<std::string>& artifacts) {
  const SweepPlan plan{cfg.sweep_alphas, cfg.sweep_cutoffs, cfg.budget};
  const SweepResult res = sweep(cfg.system, seeded(cfg), plan);
  Series table{{"alpha", "N", "estimate", "stderr", "target", "z"}, {}};
  Series full{{"alpha", "N", "l2sq", "l2sq_stderr", "G", "G_stderr", "exp_rho", "exp_rho_stderr"}, {}};
  auto& errors = report.summary["point_errors"] = nlohmann::ordered_json::array();
  for (const auto& pt : res.points) {
    if (!pt.ok) {
      errors.push_back({{"alpha", pt.alpha}, {"N", pt.cutoff}, {"error", pt.error}});
      report.verdicts.push_back(bool_verdict("stationary_identity/alpha=" + std::to_string(pt.alpha) + "/N=" +
                                                 std::to_string(pt.cutoff),
                                             "mean of G under the stationary measure equals A0N/2", false, pt.error));
      continue;
    }
    Verdict v = pt.identity;
    v.check += "/alpha=" + std::to_string(pt.alpha) + "/N=" + std::to_string(pt.cutoff);
    report.verdicts.push_back(v);
    table.rows.push_back({pt.alpha, static_cast<double>(pt.cutoff), v.estimate, v.std_error, v.target, v.z_score()});
    const auto& m = pt.measure;
    full.rows.push_back({pt.alpha, static_cast<double>(pt.cutoff), m.mean("l2sq").mean, m.mean("l2sq").std_error,
                         m.mean("G").mean, m.mean("G").std_error, m.mean("exp_rho").mean,
                         m.mean("exp_rho").std_error});
  }
  for (const auto& v : res.trend) report.verdicts.push_back(v);
  report.series["identity_sweep"] = table;
  report.series["sweep_means"] = full;
  const std::string csv = (fs::path(cfg.out_dir) / "sweep.csv").string();
  write_series_csv(full, csv);
  artifacts.push_back(csv);
}

// --- ensemble ------------------------------------------------------------------

void ensemble_checks(const RunConfig& cfg, const EmpiricalMeasure& em, Report& report,
                     std::vector<std::string>* artifacts) {
  const IntegratorConfig ic = seeded(cfg);
  EnsembleSpec spec = cfg.ensemble;
  spec.diss = cfg.system.diss;
  const ModelSpec& model = cfg.system.model;

  double c_T = cfg.ensemble_c_T;
  if (c_T == 0.0) {
    std::vector<SpectralField> fit, val;
    for (std::size_t k = 0; k < em.reservoir.size() && val.size() < 20; ++k) {
      (k % 2 == 0 ? fit : val).push_back(em.reservoir[k]);
    }
    const LocalTimeCalibration cal = calibrate_local_time(model, fit, val, spec.r, ic);
    c_T = cal.c_T;
    report.summary["c_T_calibration"] = {{"c_T", cal.c_T},
                                         {"fitted_min", cal.fitted_min},
                                         {"validation_ratio", cal.validation_ratio},
                                         {"validated", cal.validated}};
    report.verdicts.push_back(bool_verdict("local_time_calibration", "local growth |u|_{X_T} <= 2 |u0| for T = c/|u0|",
                                           cal.validated, "validation ratio " + std::to_string(cal.validation_ratio),
                                           cal.validation_ratio, 2.0));
  }
  spec.c_T = c_T;
  spec.validate();

  std::set<int> levels(cfg.ensemble_i.begin(), cfg.ensemble_i.end());
  levels.insert(spec.i);
  const std::vector<int> i_list(levels.begin(), levels.end());
  const Harvest h = ensemble_harvest(em.reservoir, spec, model, ic, i_list);

  Series comp{{"i", "members", "total", "fraction"}, {}};
  const HarvestRow* base = nullptr;
  for (const auto& row : h.rows) {
    comp.rows.push_back({static_cast<double>(row.i), static_cast<double>(row.members), static_cast<double>(row.total),
                         row.complement_fraction});
    if (row.i == spec.i) base = &row;
  }
  report.series["ensemble_complement"] = comp;
  report.verdicts.push_back(h.monotone);

  const double fraction = base && base->total > 0 ? static_cast<double>(base->members) / base->total : 0.0;
  Verdict frac;
  frac.check = "ensemble_member_fraction";
  frac.paper_ref = "Sigma^i carries most of the measure";
  frac.target = 0.9;
  frac.estimate = fraction;
  frac.status = base && base->total > 0 ? (fraction >= 0.9 ? Status::Pass : Status::Fail) : Status::Inconclusive;
  frac.detail = "members of Sigma^{i, j <= j_max} among reservoir snapshots";
  report.verdicts.push_back(frac);

  // Slow growth on every member, both time directions.
  std::vector<double> grid = slow_growth_grid(spec);
  for (std::size_t k = 1; k < slow_growth_grid(spec).size(); ++k) grid.push_back(-slow_growth_grid(spec)[k]);
  std::vector<SlowGrowth> growth(base ? base->member_indices.size() : 0);
  parallel_for(static_cast<int>(growth.size()), [&](int k) {
    growth[static_cast<std::size_t>(k)] =
        slow_growth_check(em.reservoir[static_cast<std::size_t>(base->member_indices[static_cast<std::size_t>(k)])],
                          spec, model, grid, ic);
  });
  double worst = 0.0;
  bool all = true;
  long checked = 0;
  for (const auto& g : growth) {
    all = all && g.checked && g.pass;
    checked += g.checked;
    worst = std::max(worst, g.max_ratio);
  }
  Verdict slow;
  slow.check = "slow_growth";
  slow.paper_ref = "|phi_t u0|_{H^r} <= 2 xi(1 + i + ln(1 + |t|)) on Sigma^i";
  slow.target = 1.0;
  slow.estimate = worst;
  slow.tolerance = 1.0;
  slow.status = growth.empty() ? Status::Inconclusive : (all ? Status::Pass : Status::Fail);
  slow.detail = std::to_string(checked) + " members checked over |t| <= e^j_max";
  report.verdicts.push_back(slow);

  report.summary["ensemble"] = {{"i", spec.i},
                                {"j_max", spec.j},
                                {"r", spec.r},
                                {"c_T", spec.c_T},
                                {"radius", spec.radius()},
                                {"members", base ? base->members : 0},
                                {"total", base ? base->total : 0},
                                {"complement_fraction", base ? base->complement_fraction : 0.0}};
  if (artifacts) {
    std::vector<SpectralField> members;
    if (base) {
      for (int k : base->member_indices) members.push_back(em.reservoir[static_cast<std::size_t>(k)]);
    }
    const std::string snaps = (fs::path(cfg.out_dir) / "members.imlb").string();
    fs::create_directories(cfg.out_dir);
    save_snapshots(snaps, members);
    artifacts->push_back(snaps);
    const std::string js = (fs::path(cfg.out_dir) / "ensemble.json").string();
    std::ofstream out(js);
    out << report.summary["ensemble"].dump(2) << "\n";
    artifacts->push_back(js);
  }
}

// --- verify --------------------------------------------------------------------

struct VerifyContext {
  const RunConfig& cfg;
  Report& report;
  std::optional<EmpiricalMeasure> measure;

  const EmpiricalMeasure& em() {
    if (!measure) {
      measure = estimate_stationary(cfg.system, seeded(cfg), cfg.budget);
      report.summary["measure"] = {{"alpha", cfg.system.alpha},
                                   {"A0N", measure->A0N},
                                   {"records", measure->records},
                                   {"reservoir", measure->reservoir.size()},
                                   {"usable", measure->usable},
                                   {"halving_warnings", measure->halving_warnings}};
    }
    return *measure;
  }
};

void check_structure(VerifyContext& ctx, std::vector<Verdict>& out) {
  const std::vector<ModelSpec> specs{ModelSpec::euler2d(8), ModelSpec::euler3d(3), ModelSpec::gsqg(0.5, 8),
                                     ModelSpec::sabra(12), ModelSpec::goy(12)};
  for (const auto& spec : specs) {
    const StructureReport rep = verify_structure(spec, ctx.cfg.structure_trials, ctx.cfg.seed);
    for (const auto& c : rep.checks) {
      Verdict v;
      v.check = "structure/" + to_string(spec.variant) + "/" + c.name;
      v.paper_ref = "skew structure of the bilinear term";
      v.estimate = c.max_violation;
      v.tolerance = c.tolerance;
      v.status = c.pass ? Status::Pass : Status::Fail;
      v.detail = std::to_string(rep.trials) + " random states";
      out.push_back(v);
    }
  }
}

void check_conservation(VerifyContext& ctx, std::vector<Verdict>& out) {
  const ModelSpec& model = ctx.cfg.system.model;
  std::mt19937_64 rng(stream_seed(ctx.cfg.seed, 0xc0));
  const SpectralField u0 = random_field(model.state_space(), rng);
  const FlowResult run = deterministic_flow(model, u0, 0.0, ctx.cfg.horizon, seeded(ctx.cfg));
  const double e0 = l2_norm_sq(u0);
  out.push_back(gate("conservation/l2sq", "the Galerkin flow conserves |u|^2", e0, l2_norm_sq(run.final_state), 0.0,
                     0.0, 1e-6, 1e-300));
  out.back().tolerance = 1e-6 * e0;
  out.back().status = std::abs(l2_norm_sq(run.final_state) - e0) <= 1e-6 * e0 ? Status::Pass : Status::Fail;
  if (has_secondary_hamiltonian(model)) {
    const double h0 = secondary_hamiltonian(model, u0);
    const double h1 = secondary_hamiltonian(model, run.final_state);
    const double tol = (model.variant == ModelVariant::GSQG ? 1e-5 : 1e-6) * std::abs(h0);
    Verdict v = bool_verdict("conservation/H", "the secondary invariant is conserved", std::abs(h1 - h0) <= tol,
                             "relative drift", h1, h0);
    v.tolerance = tol;
    out.push_back(v);
  }
}

void check_balance(VerifyContext& ctx, std::vector<Verdict>& out) {
  const RunConfig& cfg = ctx.cfg;
  const FDSystem& sys = cfg.system;
  const double A0N = NoiseModel(sys.noise, sys.model.state_space()).total_variance();
  IntegratorConfig ic = seeded(cfg);
  double previous = 0.0, previous_se = 0.0;
  Series series{{"dt", "residual", "stderr"}, {}};
  for (int level = 0; level < 2; ++level) {
    const auto runs = run_paths(sys, ic, cfg.horizon, ic.paths, {BalanceFunction::identity()}, nullptr);
    std::vector<TrajectoryRecord> recs;
    for (const auto& r : runs) recs.push_back(r.record);
    const BalanceSeries b = ito_balance_residual(BalanceFunction::identity(), recs, sys.alpha, A0N);
    if (level == 0) ctx.report.series["balance/x"] = balance_series(b);
    const double r = b.mean.back(), se = b.std_error.back();
    series.rows.push_back({ic.dt, r, se});
    if (level == 0) {
      Verdict v;
      v.check = "ito_balance/x";
      v.paper_ref = "Ito energy balance";
      v.estimate = r;
      v.std_error = se;
      v.tolerance = 0.05 * sys.alpha * A0N * cfg.horizon;
      v.status = std::abs(r) <= v.tolerance ? Status::Pass : Status::Fail;
      v.detail = "residual at t = horizon against 5% of alpha A0N t over " + std::to_string(ic.paths) + " paths";
      out.push_back(v);
      previous = r;
      previous_se = se;
    } else {
      // Halving dt should roughly halve the bias: |r(dt/2) - r(dt)/2| within
      // 3 combined sigma plus a quarter of r(dt).
      Verdict v;
      v.check = "ito_balance/dt_halving";
      v.paper_ref = "Ito energy balance";
      v.target = previous / 2.0;
      v.estimate = r;
      v.std_error = std::hypot(se, previous_se / 2.0);
      v.tolerance = 3.0 * v.std_error + 0.25 * std::abs(previous);
      v.status = std::abs(r - v.target) <= v.tolerance && std::abs(r) < std::abs(previous) ? Status::Pass
                                                                                          : Status::Fail;
      v.detail = "residual after halving dt against half the previous residual";
      out.push_back(v);
    }
    ic.dt /= 2.0;
    ic.record_every *= 2;
  }
  ctx.report.series["balance_dt"] = series;
}

void check_convergence(VerifyContext& ctx, std::vector<Verdict>& out) {
  ModelSpec model = ctx.cfg.system.model;
  if (model.is_shell()) model = ModelSpec::euler2d(8);
  const std::vector<int> cutoffs = ctx.cfg.sweep_cutoffs.empty() ? std::vector<int>{8, 16, 32} : ctx.cfg.sweep_cutoffs;
  const int ref = 2 * cutoffs.back();
  ModelSpec ref_model = model;
  ref_model.truncation = ref;
  std::mt19937_64 rng(stream_seed(ctx.cfg.seed, 0xc1));
  SpectralField u0 = random_field(ref_model.state_space(), rng, 0.5);
  const ConvergenceTable t = galerkin_convergence_test(model, u0, cutoffs, 1.0, seeded(ctx.cfg), 10);
  Series s{{"N", "error"}, {}};
  for (const auto& row : t.rows) s.rows.push_back({static_cast<double>(row.cutoff), row.error});
  ctx.report.series["convergence"] = s;
  out.push_back(bool_verdict("galerkin_convergence", "Galerkin approximations converge in H^3", t.strictly_decreasing(),
                             "sup over [0, 1] of the H^3 error against N_ref = " + std::to_string(ref),
                             t.rows.back().error, 0.0));
}

void check_nondegeneracy(VerifyContext& ctx, std::vector<Verdict>& out) {
  const SpectralField space = SpectralField::torus_scalar(2, 8);
  const NoiseModel noise(NoiseSpec::exponential(), space);
  std::mt19937_64 rng(stream_seed(ctx.cfg.seed, 0xc2));
  double worst_asym = 0.0, min_eig = INFINITY, min_det = INFINITY;
  bool ok = true;
  for (int t = 0; t < 50; ++t) {
    SpectralField u = random_field(space, rng, 0.5);
    u *= 0.8 / sup_norm(u);
    const NondegeneracyResult r = nondegeneracy_matrix(u, noise, 3);
    worst_asym = std::max(worst_asym, r.asymmetry);
    min_eig = std::min(min_eig, r.min_eigenvalue);
    min_det = std::min(min_det, r.determinant);
    ok = ok && r.asymmetry <= 1e-12 && r.min_eigenvalue >= -1e-10 && r.determinant > 0.0;
  }
  Verdict v = bool_verdict("nondegeneracy", "det M > 0 whenever u != 0", ok,
                           "50 fields, min eigenvalue " + std::to_string(min_eig) + ", asymmetry " +
                               std::to_string(worst_asym),
                           min_det, 0.0);
  out.push_back(v);
  const NondegeneracyResult zero = nondegeneracy_matrix(space, noise, 3);
  out.push_back(bool_verdict("nondegeneracy/zero", "M vanishes at u = 0", zero.determinant == 0.0,
                             "determinant at u = 0", zero.determinant, 0.0));
}

void check_histogram(VerifyContext& ctx, std::vector<Verdict>& out) {
  const HistogramVerdict h = abs_continuity_histogram(ctx.em());
  out.push_back(h.no_atom);
  out.push_back(h.near_zero);
  // The detector must flag the zero-noise measure, which is the atom at 0.
  FDSystem zero = ctx.cfg.system;
  zero.noise = NoiseSpec::zero();
  StationaryBudget b = ctx.cfg.budget;
  b.horizon = std::min(b.horizon, 1.0);
  b.paths = 1;
  b.reservoir = std::max<std::size_t>(b.reservoir, 1000);
  IntegratorConfig ic = seeded(ctx.cfg);
  ic.record_every = 1;
  ic.dt = b.horizon / 2000.0;
  const HistogramVerdict z = abs_continuity_histogram(estimate_stationary(zero, ic, b));
  out.push_back(bool_verdict("no_atom/zero_noise_control", "the detector flags the atom of the zero-noise measure",
                             z.no_atom.status == Status::Fail, z.no_atom.detail));
}

void check_tail(VerifyContext& ctx, std::vector<Verdict>& out) {
  const EmpiricalMeasure& em = ctx.em();
  const TailTable t = tail_check(em, default_tail_levels(em));
  Series s{{"R", "value", "exceedances"}, {}};
  for (const auto& row : t.rows) s.rows.push_back({row.R, row.value, static_cast<double>(row.exceedances)});
  ctx.report.series["tail"] = s;
  out.push_back(t.verdict);
}

void check_invariance(VerifyContext& ctx, std::vector<Verdict>& out) {
  const EmpiricalMeasure& em = ctx.em();
  const auto obs = bounded_observables(em.mean("l2sq").mean, 2.0 * em.mean("Hs").mean);
  for (double t : {0.0, 1.0}) {
    InvarianceResult r = invariance_test(em, t, obs);
    for (auto& v : r.verdicts) {
      v.check += "/t=" + std::to_string(static_cast<int>(t));
      if (t == 0.0 && v.estimate != 0.0) v.status = Status::Fail;
      out.push_back(v);
    }
  }
}

}  // namespace

std::vector<Verdict> run_verify_checks(const RunConfig& cfg, Report& report) {
  VerifyContext ctx{cfg, report, std::nullopt};
  std::vector<Verdict> out;
  for (const auto& c : cfg.checks) {
    if (c == "structure") check_structure(ctx, out);
    else if (c == "conservation") check_conservation(ctx, out);
    else if (c == "identity") out.push_back(stationary_identity_check(ctx.em()));
    else if (c == "second_balance") out.push_back(second_balance_check(ctx.em()));
    else if (c == "balance") check_balance(ctx, out);
    else if (c == "convergence") check_convergence(ctx, out);
    else if (c == "ensemble") ensemble_checks(cfg, ctx.em(), report, nullptr);
    else if (c == "invariance") check_invariance(ctx, out);
    else if (c == "nondegeneracy") check_nondegeneracy(ctx, out);
    else if (c == "histogram") check_histogram(ctx, out);
    else if (c == "tail") check_tail(ctx, out);
    else throw ConfigError("unknown verify check '" + c + "'");
  }
  return out;
}

RunOutcome run(const RunConfig& cfg) {
  cfg.validate();
  RunOutcome outcome;
  Report& report = outcome.report;
  report.kind = cfg.kind;
  report.config_hash = config_hash(cfg);
  report.config_text = serialize_config(cfg);
  report.seed = cfg.seed;
  report.timestamp = utc_timestamp();
  fs::create_directories(cfg.out_dir);

  try {
    switch (cfg.kind) {
      case ExperimentKind::Simulate:
        simulate(cfg, report, outcome.artifacts);
        break;
      case ExperimentKind::Sweep:
        run_sweep(cfg, report, outcome.artifacts);
        break;
      case ExperimentKind::Ensemble: {
        const EmpiricalMeasure em = estimate_stationary(cfg.system, seeded(cfg), cfg.budget);
        if (!em.usable) throw DivergenceError("stationary run diverged: " + em.diagnostic);
        ensemble_checks(cfg, em, report, &outcome.artifacts);
        break;
      }
      case ExperimentKind::Verify: {
        std::vector<Verdict> v = run_verify_checks(cfg, report);
        report.verdicts.insert(report.verdicts.end(), v.begin(), v.end());
        break;
      }
    }
  } catch (const Error& e) {
    throw std::runtime_error(to_string(cfg.kind) + " run (" + cfg.system.model.canonical() + ", seed " +
                             std::to_string(cfg.seed) + "): " + e.what());
  }

  write_report(report, cfg.out_dir);
  outcome.artifacts.push_back((fs::path(cfg.out_dir) / "report.json").string());
  const auto plots = emit_plots_data(report, cfg.out_dir);
  outcome.artifacts.insert(outcome.artifacts.end(), plots.begin(), plots.end());
  std::ofstream(fs::path(cfg.out_dir) / "config.ini") << report.config_text;
  outcome.exit_code = report.exit_code(cfg.strict);
  return outcome;
}

}  // namespace imlab
