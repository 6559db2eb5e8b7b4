#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "imlab/integrator.hpp"
#include "imlab/statistics.hpp"
#include "imlab/verdict.hpp"

namespace imlab {

/// A pure function of the state. Bounded observables feed the invariance test.
struct Observable {
  std::string name;
  Observer f;
  bool bounded = false;
};

/// l2sq, G, Hs (at s*), expG (exp(rho(|u|_{H^s*})) clipped), l2sqG (|u|^2 G),
/// and DH_A (DH(u)[A(u)]) when the model has a secondary invariant.
std::vector<Observable> standard_observables(const FDSystem& sys, double exp_cap = 1e6);

/// tanh(|u|^2 / scale), min(|u|_{H^4}, clip) / clip and a cosine of the first
/// coefficient window, cos(Re u_0 / sqrt(scale)).
std::vector<Observable> bounded_observables(double scale, double h4_clip);

struct StationaryBudget {
  int paths = 8;
  double horizon = 50.0;
  double burn_in_fraction = 0.2;
  int batches = 30;
  std::size_t reservoir = 1000;
  void validate() const;
  bool operator==(const StationaryBudget&) const = default;
};

/// Krylov-Bogoliubov time averages after burn-in, pooled over paths.
struct EmpiricalMeasure {
  FDSystem system;
  IntegratorConfig integrator;
  StationaryBudget budget;
  double A0N = 0.0;
  double burn_in = 0.0;
  double window = 0.0;
  std::map<std::string, MeanEstimate> means;
  /// Same estimates using only the first half of each averaging window.
  std::map<std::string, MeanEstimate> half_window_means;
  std::vector<SpectralField> reservoir;
  std::vector<double> reservoir_times;
  long records = 0;
  long halving_warnings = 0;
  bool usable = true;
  std::string diagnostic;

  const MeanEstimate& mean(const std::string& name) const;
};

/// Runs budget.paths paths from u0 = 0 on the worker pool. Path p uses RNG
/// stream p of cfg.seed; merges are by path index so the result does not
/// depend on the worker count. A path that diverges leaves the measure
/// flagged unusable with the surviving paths' data.
EmpiricalMeasure estimate_stationary(const FDSystem& sys, const IntegratorConfig& cfg, const StationaryBudget& budget,
                                     const std::vector<Observable>& extra = {});

/// mean G against A0N / 2.
Verdict stationary_identity_check(const EmpiricalMeasure& em, double sigmas = 3.0, double rel_cap = 0.1);

/// mean DH(u)[A(u)] against A^H / 2 = sum_k a_k^2 H(psi_k).
Verdict second_balance_check(const EmpiricalMeasure& em, double sigmas = 3.0, double rel_cap = 0.1);
double second_balance_target(const ModelSpec& model, const NoiseSpec& noise);

struct TailRow {
  double R = 0.0;
  double value = 0.0;
  long exceedances = 0;
};

struct TailTable {
  std::vector<TailRow> rows;
  double exponent = 0.0;
  Verdict verdict;
};

/// E[G 1{|u|^2 > R}] over the reservoir and the fitted decay exponent of its
/// log against log R; points with fewer than 5 exceedances are left out of
/// the fit and fewer than two fitted points make the verdict inconclusive.
TailTable tail_check(const EmpiricalMeasure& em, const std::vector<double>& R_list, double min_exponent = 0.8);
/// R in {1, 2, 4, 8} times the reservoir median of |u|^2.
std::vector<double> default_tail_levels(const EmpiricalMeasure& em);

struct InvarianceResult {
  std::vector<Verdict> verdicts;
  int used = 0;
  int excluded = 0;
};

/// Pushes every reservoir snapshot forward by the deterministic flow to time
/// t and compares each bounded observable before and after. Paired gate:
/// |mean difference| <= sigmas * stderr(difference) + floor.
InvarianceResult invariance_test(const EmpiricalMeasure& em, double t, const std::vector<Observable>& observables,
                                 double sigmas = 3.0, double floor = 1e-9);

struct HistogramLevel {
  int bins = 0;
  double width = 0.0;
  double max_mass = 0.0;
  double allowed = 0.0;
};

struct HistogramVerdict {
  std::vector<HistogramLevel> levels;
  /// P(|u| <= delta) / delta at delta = {0.1, 0.05, 0.025} * median |u|.
  std::vector<double> near_zero_ratio;
  Verdict no_atom;
  Verdict near_zero;
};

/// Histogram of |u|^2 on [0, max] at `bins`, 2 bins, 4 bins. C is twice the
/// largest coarse density and every refinement must keep max mass <= C width
/// (plus a 3 sigma binomial allowance). Fewer than min_samples reservoir
/// entries give inconclusive verdicts; a sample with no spread is an atom.
HistogramVerdict abs_continuity_histogram(const EmpiricalMeasure& em, int bins = 10, std::size_t min_samples = 1000);
HistogramVerdict abs_continuity_histogram(const std::vector<double>& energies, int bins = 10,
                                          std::size_t min_samples = 1000);

struct NondegeneracyResult {
  Eigen::MatrixXd M;
  double determinant = 0.0;
  double min_eigenvalue = 0.0;
  double asymmetry = 0.0;
};

/// f_p(z) = z^{2p} + z^2, M_ij = sum_k a_k^2 <f_i'(u), psi_k> <f_j'(u), psi_k>
/// for a torus scalar u with |u|_inf <= 1 and n <= 6.
NondegeneracyResult nondegeneracy_matrix(const SpectralField& u, const NoiseModel& noise, int n);

// Sweeps -----------------------------------------------------------------------

struct SweepPlan {
  std::vector<double> alphas;  // decreasing
  std::vector<int> cutoffs;    // increasing
  StationaryBudget budget;
  void validate() const;
};

struct SweepPoint {
  double alpha = 0.0;
  int cutoff = 0;
  bool ok = false;
  std::string error;
  EmpiricalMeasure measure;
  Verdict identity;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<Verdict> trend;
};

/// Every (alpha, N) pair of the plan; an empty list keeps the base value. The
/// trend checks bounded-observable means across the last two alphas (Cauchy
/// within 2x combined stderr) and the clipped exp moment across N.
SweepResult sweep(const FDSystem& base, const IntegratorConfig& cfg, const SweepPlan& plan, double exp_cap = 1e6);

}  // namespace imlab
