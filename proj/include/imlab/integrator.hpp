#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "imlab/dissipation.hpp"
#include "imlab/model.hpp"
#include "imlab/noise.hpp"

namespace imlab {

struct IntegratorConfig {
  /// Step of the stochastic splitting; first trial step of the adaptive flow.
  double dt = 1e-3;
  double dt_max = 0.05;
  /// dt <= c_step / (1 + |u|_{H^m}).
  double c_step = 0.5;
  /// m in the step cap; -1 picks 4 on the torus and 1 for shells.
  int step_norm_index = -1;
  double rtol = 1e-10;
  double atol = 1e-13;
  /// Stochastic paths record every `record_every` steps (and at the end).
  int record_every = 1;
  std::uint64_t seed = 0;
  int paths = 1;

  void validate() const;
  double step_cap(const SpectralField& u) const;
  bool operator==(const IntegratorConfig&) const = default;
};

using Observer = std::function<double(const SpectralField&)>;

struct NamedObserver {
  std::string name;
  Observer f;
};

/// Time series of observables along one path.
struct TrajectoryRecord {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> series;
  /// States at the recorded times when requested (same indexing as times).
  std::vector<SpectralField> snapshots;
  std::uint64_t stream = 0;
  /// Deterministic: accepted steps. Stochastic: steps.
  long steps = 0;
  /// Dissipation substeps that needed more than 20 halvings.
  long halving_warnings = 0;

  const std::vector<double>& at(const std::string& name) const;
  bool has(const std::string& name) const { return series.count(name) != 0; }
};

struct FlowOptions {
  /// Times at which to record; default {t0, t1}. Must be ordered along the
  /// direction of integration.
  std::vector<double> output_times;
  std::vector<NamedObserver> observers;
  bool keep_snapshots = false;
};

struct FlowResult {
  TrajectoryRecord record;
  SpectralField final_state;
};

/// Galerkin flow du/dt = -B(u, u) (plus Coriolis) by adaptive Dormand-Prince
/// 5(4). t1 < t0 integrates backward. Records "l2sq" and, when defined, "H".
FlowResult deterministic_flow(const ModelSpec& model, const SpectralField& u0, double t0, double t1,
                              const IntegratorConfig& cfg, const FlowOptions& options = {});

/// F(|u|^2) with its first two derivatives, for Itô balances.
struct BalanceFunction {
  std::string name;
  std::function<double(double)> F, F1, F2;

  static BalanceFunction identity();
  static BalanceFunction power(int p);
  static BalanceFunction constant(double c);
};

struct PathOptions {
  std::vector<BalanceFunction> balance;
  std::vector<NamedObserver> observers;
  bool keep_snapshots = false;
  /// Called at every recorded time with the current state.
  std::function<void(double, const SpectralField&)> on_record;
};

/// Everything a fluctuation-dissipation path needs besides its data.
struct FDSystem {
  ModelSpec model;
  DissipationSpec diss;
  NoiseSpec noise;
  double alpha = 0.0;
  bool operator==(const FDSystem&) const = default;
};

/// du = (-B(u, u) - alpha A(u)) dt + sqrt(alpha) dzeta_N on [t0, t1] by Lie
/// splitting with step cfg.dt: RK4 transport, damped explicit a2/a3 substeps,
/// then an exact Ornstein-Uhlenbeck step for the a1 part plus noise.
///
/// Records "l2sq", "G", "Q", the left-point "int_G", the martingale
/// "martingale" (sum of 2 <v, eta>) and, per balance function F, the sums
/// "bal/F/F", "bal/F/F1G", "bal/F/F1", "bal/F/F2Q", "bal/F/F1M".
/// alpha = 0 delegates to deterministic_flow.
FlowResult stochastic_path(const FDSystem& sys, const SpectralField& u0, double t0, double t1,
                           const IntegratorConfig& cfg, std::mt19937_64& rng, const PathOptions& options = {});

/// Same with the path's RNG stream derived from (cfg.seed, stream).
FlowResult stochastic_path(const FDSystem& sys, const SpectralField& u0, double t1, const IntegratorConfig& cfg,
                           std::uint64_t stream, const PathOptions& options = {});

// Balance residuals ------------------------------------------------------------

struct BalanceSeries {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> std_error;
  /// Largest |mean| among the individual balance terms at each time.
  std::vector<double> scale;
  int paths = 0;
};

/// Ensemble mean of
///   F(e_t) - F(e_0) + 2 alpha int F'(e) G - alpha A_{0,N} int F'(e)
///   - 2 alpha int F''(e) Q(u) - [int F'(e) dM]
/// with e = |u|^2. The bracketed martingale term has mean zero and is
/// subtracted pathwise as a control variate when requested.
BalanceSeries ito_balance_residual(const BalanceFunction& F, const std::vector<TrajectoryRecord>& ensemble,
                                   double alpha, double A0N, bool control_variate = true);

// Convergence and local growth --------------------------------------------------

struct ConvergenceRow {
  int cutoff = 0;
  double error = 0.0;
};

struct ConvergenceTable {
  int reference_cutoff = 0;
  double horizon = 0.0;
  double sobolev_index = 3.0;
  std::vector<ConvergenceRow> rows;

  bool nonincreasing() const;
  bool strictly_decreasing() const;
};

/// sup over `samples` + 1 uniform times in [0, T] of
/// |phi^{ref}_t u0 - phi^N_t Pi_N u0|_{H^s}, for each N in `cutoffs`; u0 lives
/// at the reference truncation.
ConvergenceTable galerkin_convergence_test(const ModelSpec& model, const SpectralField& u0_ref,
                                           const std::vector<int>& cutoffs, double horizon,
                                           const IntegratorConfig& cfg, int samples = 20, double s = 3.0);

struct LocalTimeCalibration {
  double c_T = 0.0;
  double safety = 0.5;
  double fitted_min = 0.0;    // smallest doubling constant on the fit set
  double validation_ratio = 0.0;  // max sup|u|_{H^m} / |u0|_{H^m} on validation data
  bool validated = false;
  double sobolev_index = 0.0;
};

/// Largest c with sup_{t <= c / |u0|_{H^m}} |u(t)|_{H^m} <= 2 |u0|_{H^m}, per
/// datum, capped at c_max; c_T = safety * min over `fit`, then checked on
/// `validation`.
LocalTimeCalibration calibrate_local_time(const ModelSpec& model, const std::vector<SpectralField>& fit,
                                          const std::vector<SpectralField>& validation, double m,
                                          const IntegratorConfig& cfg, double safety = 0.5, double c_max = 4.0);

// Checkpoints -----------------------------------------------------------------

struct Checkpoint {
  SpectralField state;
  double time = 0.0;
  std::mt19937_64 rng;
};

void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace imlab
