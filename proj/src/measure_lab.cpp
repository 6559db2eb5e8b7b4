#include "imlab/measure_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "imlab/collocation.hpp"
#include "imlab/errors.hpp"
#include "imlab/parallel.hpp"
#include "imlab/spectral_ops.hpp"

namespace imlab {

std::vector<Observable> standard_observables(const FDSystem& sys, double exp_cap) {
  std::vector<Observable> obs;
  const DissipationSpec diss = sys.diss;
  obs.push_back({"l2sq", [](const SpectralField& u) { return l2_norm_sq(u); }});
  obs.push_back({"G", [diss](const SpectralField& u) { return G_potential(diss, u); }});
  obs.push_back({"Hs", [diss](const SpectralField& u) { return hs_norm(u, diss.s_star); }});
  obs.push_back({"exp_rho", [diss, exp_cap](const SpectralField& u) {
                   const double r = diss.rho(hs_norm(u, diss.s_star));
                   return r >= std::log(exp_cap) ? exp_cap : std::exp(r);
                 }});
  obs.push_back({"l2sqG", [diss](const SpectralField& u) { return l2_norm_sq(u) * G_potential(diss, u); }});
  if (has_secondary_hamiltonian(sys.model)) {
    const ModelSpec model = sys.model;
    obs.push_back({"H", [model](const SpectralField& u) { return secondary_hamiltonian(model, u); }});
    obs.push_back({"DH_A", [model, diss](const SpectralField& u) {
                     return secondary_derivative(model, u, apply_A(diss, u));
                   }});
  }
  return obs;
}

std::vector<Observable> bounded_observables(double scale, double h4_clip) {
  if (!(scale > 0.0) || !(h4_clip > 0.0)) throw DomainError("bounded observables need positive scales");
  const double root = std::sqrt(scale);
  return {
      {"tanh_l2sq", [scale](const SpectralField& u) { return std::tanh(l2_norm_sq(u) / scale); }, true},
      {"clipped_h4", [h4_clip](const SpectralField& u) { return std::min(hs_norm(u, 4.0), h4_clip) / h4_clip; }, true},
      {"cos_coeff", [root](const SpectralField& u) { return std::cos(u.coeffs()(0, 0).real() / root); }, true},
  };
}

void StationaryBudget::validate() const {
  if (paths < 1) throw DomainError("stationary budget needs at least one path");
  if (!(horizon > 0.0)) throw DomainError("stationary horizon must be > 0");
  if (!(burn_in_fraction >= 0.0) || !(burn_in_fraction < 1.0)) throw DomainError("burn-in fraction must lie in [0, 1)");
  if (batches < 2) throw DomainError("batch means need at least two batches");
}

const MeanEstimate& EmpiricalMeasure::mean(const std::string& name) const {
  auto it = means.find(name);
  if (it == means.end()) throw DataError("empirical measure has no observable '" + name + "'");
  return it->second;
}

namespace {

struct PathSamples {
  std::map<std::string, std::vector<double>> series;
  Reservoir<std::pair<double, SpectralField>> reservoir;
  long halving_warnings = 0;
  std::string failure;
};

}  // namespace

EmpiricalMeasure estimate_stationary(const FDSystem& sys, const IntegratorConfig& cfg, const StationaryBudget& budget,
                                     const std::vector<Observable>& extra) {
  if (!(sys.alpha > 0.0)) throw DomainError("estimate_stationary needs alpha > 0");
  budget.validate();
  cfg.validate();
  sys.model.validate();
  sys.diss.validate();

  EmpiricalMeasure em;
  em.system = sys;
  em.integrator = cfg;
  em.budget = budget;
  const SpectralField u0 = sys.model.state_space();
  em.A0N = NoiseModel(sys.noise, u0).total_variance();
  em.burn_in = budget.burn_in_fraction * budget.horizon;
  em.window = budget.horizon - em.burn_in;

  std::vector<Observable> obs = standard_observables(sys);
  obs.insert(obs.end(), extra.begin(), extra.end());

  const std::size_t per_path = (budget.reservoir + budget.paths - 1) / budget.paths;
  std::vector<PathSamples> samples(static_cast<std::size_t>(budget.paths));
  parallel_for(budget.paths, [&](int p) {
    PathSamples& mine = samples[static_cast<std::size_t>(p)];
    mine.reservoir = Reservoir<std::pair<double, SpectralField>>(per_path, stream_seed(cfg.seed ^ 0x5eed, p));
    for (const auto& o : obs) mine.series[o.name];
    PathOptions opts;
    opts.on_record = [&](double t, const SpectralField& u) {
      if (t < em.burn_in) return;
      for (const auto& o : obs) mine.series[o.name].push_back(o.f(u));
      mine.reservoir.offer({t, u});
    };
    try {
      const FlowResult run = stochastic_path(sys, u0, budget.horizon, cfg, static_cast<std::uint64_t>(p), opts);
      mine.halving_warnings = run.record.halving_warnings;
    } catch (const Error& e) {
      mine.failure = e.what();
    }
  });

  for (const auto& o : obs) {
    std::vector<std::vector<double>> full, half;
    for (const auto& s : samples) {
      const auto& x = s.series.at(o.name);
      full.push_back(batch_means(x, budget.batches));
      const std::vector<double> first(x.begin(), x.begin() + static_cast<long>(x.size() / 2));
      half.push_back(batch_means(first, budget.batches));
    }
    em.means[o.name] = pooled_estimate(full);
    em.half_window_means[o.name] = pooled_estimate(half);
  }
  for (std::size_t p = 0; p < samples.size(); ++p) {
    auto& s = samples[p];
    em.records += static_cast<long>(s.series.at("l2sq").size());
    em.halving_warnings += s.halving_warnings;
    for (auto& [t, u] : s.reservoir.items()) {
      em.reservoir_times.push_back(t);
      em.reservoir.push_back(std::move(u));
    }
    if (!s.failure.empty()) {
      em.usable = false;
      em.diagnostic += "path " + std::to_string(p) + ": " + s.failure + "; ";
    }
  }
  return em;
}

Verdict stationary_identity_check(const EmpiricalMeasure& em, double sigmas, double rel_cap) {
  const MeanEstimate& g = em.mean("G");
  const double target = em.A0N / 2.0;
  if (target > 0.0 && g.std_error == 0.0) {
    throw DataError("stationary estimate of G has zero standard error; the averaging window is too short");
  }
  Verdict v = gate("stationary_identity", "mean of G under the stationary measure equals A0N/2", target, g.mean,
                   g.std_error, sigmas, rel_cap);
  if (!em.usable) {
    v.status = Status::Fail;
    v.detail += "; measure unusable: " + em.diagnostic;
  }
  return v;
}

double second_balance_target(const ModelSpec& model, const NoiseSpec& noise) {
  if (!has_secondary_hamiltonian(model)) throw CapabilityError(to_string(model.variant) + " has no secondary invariant");
  const NoiseModel nm(noise, model.state_space());
  // H is quadratic, so D^2 H[psi, psi] / 2 = H(psi).
  return nm.weighted_total([&](int k) { return secondary_hamiltonian(model, nm.direction(k)); });
}

Verdict second_balance_check(const EmpiricalMeasure& em, double sigmas, double rel_cap) {
  const double target = second_balance_target(em.system.model, em.system.noise);
  const MeanEstimate& h = em.mean("DH_A");
  Verdict v = gate("second_balance", "mean of DH(u)[A(u)] equals A^H/2", target, h.mean, h.std_error, sigmas, rel_cap);
  if (!em.usable) {
    v.status = Status::Fail;
    v.detail += "; measure unusable: " + em.diagnostic;
  }
  return v;
}

namespace {

double median(std::vector<double> x) {
  if (x.empty()) return 0.0;
  const auto mid = x.begin() + static_cast<long>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  return *mid;
}

std::vector<double> reservoir_energies(const EmpiricalMeasure& em) {
  std::vector<double> e;
  e.reserve(em.reservoir.size());
  for (const auto& u : em.reservoir) e.push_back(l2_norm_sq(u));
  return e;
}

}  // namespace

std::vector<double> default_tail_levels(const EmpiricalMeasure& em) {
  const double med = median(reservoir_energies(em));
  return {med, 2 * med, 4 * med, 8 * med};
}

TailTable tail_check(const EmpiricalMeasure& em, const std::vector<double>& R_list, double min_exponent) {
  if (em.reservoir.empty()) throw DataError("tail check needs a nonempty reservoir");
  std::vector<double> e, g;
  for (const auto& u : em.reservoir) {
    e.push_back(l2_norm_sq(u));
    g.push_back(G_potential(em.system.diss, u));
  }
  TailTable table;
  const double K = static_cast<double>(e.size());
  std::vector<double> lx, ly;
  for (double R : R_list) {
    TailRow row{R, 0.0, 0};
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > R) {
        row.value += g[i];
        ++row.exceedances;
      }
    }
    row.value /= K;
    table.rows.push_back(row);
    if (row.exceedances >= 5 && row.value > 0.0 && R > 0.0) {
      lx.push_back(std::log(R));
      ly.push_back(std::log(row.value));
    }
  }
  Verdict& v = table.verdict;
  v.check = "tail_decay";
  v.paper_ref = "tail bound: integral of G over {|u|^2 > R} is O(1/R)";
  v.target = min_exponent;
  bool all_zero = true;
  for (const auto& r : table.rows) all_zero = all_zero && r.value == 0.0;
  if (all_zero) {
    v.status = Status::Pass;
    v.detail = "all tail values are 0";
    return table;
  }
  if (lx.size() < 2) {
    v.status = Status::Inconclusive;
    v.detail = "fewer than two levels with at least 5 exceedances";
    return table;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  table.exponent = sxx > 0.0 ? -sxy / sxx : 0.0;
  v.estimate = table.exponent;
  v.status = table.exponent >= min_exponent ? Status::Pass : Status::Fail;
  v.detail = "fitted on " + std::to_string(lx.size()) + " levels";
  return table;
}

InvarianceResult invariance_test(const EmpiricalMeasure& em, double t, const std::vector<Observable>& observables,
                                 double sigmas, double floor) {
  if (em.reservoir.size() < 100) throw DataError("invariance test needs at least 100 reservoir snapshots");
  const int K = static_cast<int>(em.reservoir.size());
  const std::size_t n_obs = observables.size();
  std::vector<std::vector<double>> diff(static_cast<std::size_t>(K), std::vector<double>(n_obs, 0.0));
  std::vector<char> ok(static_cast<std::size_t>(K), 0);
  parallel_for(K, [&](int k) {
    const SpectralField& v = em.reservoir[static_cast<std::size_t>(k)];
    SpectralField w = v;
    if (t != 0.0) {
      try {
        w = deterministic_flow(em.system.model, v, 0.0, t, em.integrator).final_state;
      } catch (const Error&) {
        return;
      }
    }
    for (std::size_t j = 0; j < n_obs; ++j) diff[static_cast<std::size_t>(k)][j] = observables[j].f(w) - observables[j].f(v);
    ok[static_cast<std::size_t>(k)] = 1;
  });
  InvarianceResult res;
  for (char c : ok) (c ? res.used : res.excluded) += 1;
  for (std::size_t j = 0; j < n_obs; ++j) {
    RunningStats s;
    for (int k = 0; k < K; ++k) {
      if (ok[static_cast<std::size_t>(k)]) s.push(diff[static_cast<std::size_t>(k)][j]);
    }
    Verdict v;
    v.check = "invariance/" + observables[j].name;
    v.paper_ref = "invariance of the limiting measure under the flow";
    v.estimate = s.mean();
    v.std_error = s.stderr_of_mean();
    v.tolerance = sigmas * v.std_error + floor;
    v.status = res.used > 0 && std::abs(v.estimate) <= v.tolerance ? Status::Pass : Status::Fail;
    std::ostringstream d;
    d << "t = " << t << ", paired over " << res.used << " snapshots, " << res.excluded << " excluded";
    v.detail = d.str();
    res.verdicts.push_back(v);
  }
  return res;
}

HistogramVerdict abs_continuity_histogram(const EmpiricalMeasure& em, int bins, std::size_t min_samples) {
  return abs_continuity_histogram(reservoir_energies(em), bins, min_samples);
}

HistogramVerdict abs_continuity_histogram(const std::vector<double>& energies, int bins, std::size_t min_samples) {
  if (bins < 1) throw DomainError("histogram needs at least one bin");
  HistogramVerdict out;
  out.no_atom.check = "no_atom";
  out.no_atom.paper_ref = "absolute continuity of the law of |u|^2";
  out.near_zero.check = "near_zero_mass";
  out.near_zero.paper_ref = "P(|u| <= delta) <= C delta";
  out.no_atom.target = out.near_zero.target = 1.0;
  const double K = static_cast<double>(energies.size());
  if (energies.empty()) {
    out.no_atom.status = out.near_zero.status = Status::Inconclusive;
    out.no_atom.detail = out.near_zero.detail = "empty sample";
    return out;
  }
  const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
  const double hi = *hi_it;
  if (hi == *lo_it) {
    out.no_atom.status = out.near_zero.status = Status::Fail;
    out.no_atom.estimate = out.near_zero.estimate = INFINITY;
    std::ostringstream d;
    d << "all " << energies.size() << " samples equal " << hi << ": atom";
    out.no_atom.detail = out.near_zero.detail = d.str();
    return out;
  }

  double C = 0.0;
  double worst = 0.0;
  for (int level = 0; level < 3; ++level) {
    HistogramLevel h;
    h.bins = bins << level;
    h.width = hi / h.bins;
    std::vector<long> counts(static_cast<std::size_t>(h.bins), 0);
    for (double x : energies) {
      const int b = std::min(h.bins - 1, static_cast<int>(x / h.width));
      ++counts[static_cast<std::size_t>(b)];
    }
    h.max_mass = static_cast<double>(*std::max_element(counts.begin(), counts.end())) / K;
    if (level == 0) C = 2.0 * h.max_mass / h.width;
    const double p = std::min(1.0, C * h.width);
    h.allowed = p + 3.0 * std::sqrt(p * (1.0 - p) / K);
    if (level > 0) worst = std::max(worst, h.max_mass / h.allowed);
    out.levels.push_back(h);
  }
  out.no_atom.estimate = worst;
  out.no_atom.tolerance = 1.0;
  out.no_atom.detail = "max refined mass over allowed C width, C = " + std::to_string(C);

  std::vector<double> norms;
  for (double x : energies) norms.push_back(std::sqrt(std::max(0.0, x)));
  const double scale = median(norms);
  double ratio_worst = 0.0;
  double base = 0.0;
  bool atom_at_zero = scale == 0.0;
  for (double f : {0.1, 0.05, 0.025}) {
    const double delta = f * scale;
    double count = 0;
    for (double r : norms) count += r <= delta ? 1.0 : 0.0;
    const double P = count / K;
    const double ratio = delta > 0.0 ? P / delta : INFINITY;
    out.near_zero_ratio.push_back(ratio);
    if (out.near_zero_ratio.size() == 1) {
      base = ratio;
    } else {
      const double allowance = 3.0 * std::sqrt(std::max(P, 1.0 / K) / K) / delta;
      ratio_worst = std::max(ratio_worst, ratio / (2.0 * base + allowance));
    }
  }
  out.near_zero.estimate = atom_at_zero ? INFINITY : ratio_worst;
  out.near_zero.tolerance = 1.0;
  out.near_zero.detail = "ratio growth relative to twice the coarsest ratio";

  const bool enough = energies.size() >= min_samples;
  auto decide = [&](Verdict& v) {
    if (!(v.estimate <= 1.0)) {
      v.status = Status::Fail;
    } else {
      v.status = enough ? Status::Pass : Status::Inconclusive;
    }
    if (!enough) v.detail += "; only " + std::to_string(energies.size()) + " samples";
  };
  decide(out.no_atom);
  decide(out.near_zero);
  return out;
}

NondegeneracyResult nondegeneracy_matrix(const SpectralField& u, const NoiseModel& noise, int n) {
  if (u.kind() != FieldKind::TorusScalar) throw CapabilityError("nondegeneracy matrix needs a torus scalar field");
  if (n < 1 || n > 6) throw DomainError("nondegeneracy matrix size must lie in [1, 6]");
  noise.space().require_same_space(u, "nondegeneracy_matrix");
  for (int k = 0; k < noise.size(); ++k) {
    if (noise.amplitude(k) == 0.0) throw DomainError("nondegeneracy matrix needs every noise amplitude nonzero");
  }
  if (sup_norm(u) > 1.0) throw DomainError("nondegeneracy matrix needs |u|_inf <= 1; rescale the field");

  const Collocation grid = Collocation::for_products(u.mode_set(), 2 * n - 1);
  const Eigen::ArrayXd z = grid.synthesize(u.coeffs().col(0));
  Eigen::MatrixXd proj(n, noise.size());
  SpectralField fp = u.zeros_like();
  for (int p = 1; p <= n; ++p) {
    const Eigen::ArrayXd d = 2.0 * p * z.pow(2 * p - 1) + 2.0 * z;
    fp.coeffs().col(0) = grid.analyze(d);
    for (int k = 0; k < noise.size(); ++k) proj(p - 1, k) = noise.amplitude(k) * noise.project(fp, k);
  }
  NondegeneracyResult res;
  res.M = proj * proj.transpose();
  res.asymmetry = (res.M - res.M.transpose()).cwiseAbs().maxCoeff();
  res.determinant = res.M.determinant();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(res.M, Eigen::EigenvaluesOnly);
  res.min_eigenvalue = eig.eigenvalues().minCoeff();
  return res;
}

void SweepPlan::validate() const {
  if (alphas.empty() && cutoffs.empty()) throw DomainError("sweep plan needs an alpha list or a cutoff list");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw DomainError("sweep alphas must be > 0");
    if (i > 0 && !(alphas[i] < alphas[i - 1])) throw DomainError("sweep alphas must decrease");
  }
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1) throw DomainError("sweep cutoffs must be >= 1");
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) throw DomainError("sweep cutoffs must increase");
  }
  budget.validate();
}

SweepResult sweep(const FDSystem& base, const IntegratorConfig& cfg, const SweepPlan& plan, double exp_cap) {
  plan.validate();
  const std::vector<double> alphas = plan.alphas.empty() ? std::vector<double>{base.alpha} : plan.alphas;
  const std::vector<int> cutoffs = plan.cutoffs.empty() ? std::vector<int>{base.model.truncation} : plan.cutoffs;

  SweepResult out;
  std::vector<Observable> bounded;
  for (int n : cutoffs) {
    for (double a : alphas) {
      SweepPoint pt;
      pt.alpha = a;
      pt.cutoff = n;
      FDSystem sys = base;
      sys.alpha = a;
      sys.model.truncation = n;
      try {
        pt.measure = estimate_stationary(sys, cfg, plan.budget, bounded);
        if (bounded.empty()) {
          // Scales fixed by the first point so every point averages the same functions.
          const double scale = std::max(pt.measure.mean("l2sq").mean, 1e-300);
          const double clip = std::max(2.0 * pt.measure.mean("Hs").mean, 1e-300);
          bounded = bounded_observables(scale, clip);
          pt.measure = estimate_stationary(sys, cfg, plan.budget, bounded);
        }
        pt.identity = stationary_identity_check(pt.measure);
        pt.ok = pt.measure.usable;
        if (!pt.ok) pt.error = pt.measure.diagnostic;
      } catch (const Error& e) {
        pt.ok = false;
        pt.error = e.what();
      }
      out.points.push_back(std::move(pt));
    }
  }

  // Cauchy check on the last two alphas at each cutoff.
  if (alphas.size() >= 2) {
    const std::size_t na = alphas.size();
    for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
      const SweepPoint& a = out.points[ci * na + na - 2];
      const SweepPoint& b = out.points[ci * na + na - 1];
      for (const auto& o : bounded) {
        Verdict v;
        v.check = "alpha_stability/N" + std::to_string(cutoffs[ci]) + "/" + o.name;
        v.paper_ref = "bounded observables converge as alpha decreases";
        if (!a.ok || !b.ok) {
          v.status = Status::Fail;
          v.detail = "sweep point failed";
        } else {
          const MeanEstimate& ma = a.measure.mean(o.name);
          const MeanEstimate& mb = b.measure.mean(o.name);
          v.target = ma.mean;
          v.estimate = mb.mean;
          v.std_error = std::hypot(ma.std_error, mb.std_error);
          v.tolerance = 2.0 * v.std_error + 1e-12;
          v.status = std::abs(v.estimate - v.target) <= v.tolerance ? Status::Pass : Status::Fail;
        }
        out.trend.push_back(v);
      }
    }
  } else {
    Verdict v;
    v.check = "alpha_stability";
    v.paper_ref = "bounded observables converge as alpha decreases";
    v.status = Status::Pass;
    v.detail = "single alpha: nothing to compare";
    out.trend.push_back(v);
  }

  // Uniform bound in N of the clipped exponential moment and of the energy.
  {
    Verdict v;
    v.check = "uniform_in_N";
    v.paper_ref = "uniform bound on the exponential Sobolev moment";
    v.target = exp_cap;
    bool all_ok = true;
    double worst = 0.0;
    for (const auto& pt : out.points) {
      if (!pt.ok) {
        all_ok = false;
        continue;
      }
      worst = std::max(worst, pt.measure.mean("exp_rho").mean);
    }
    v.estimate = worst;
    v.tolerance = exp_cap;
    v.status = all_ok && worst < exp_cap ? Status::Pass : Status::Fail;
    v.detail = "largest mean of the clipped exp moment across the plan";
    out.trend.push_back(v);
  }
  return out;
}

}  // namespace imlab
