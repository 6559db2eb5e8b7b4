#include "imlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "imlab/errors.hpp"
#include "imlab/snapshot_io.hpp"
#include "imlab/spectral_ops.hpp"
#include "imlab/statistics.hpp"

namespace imlab {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("integrator dt must be > 0");
  if (!(dt_max > 0.0)) throw DomainError("integrator dt_max must be > 0");
  if (!(c_step > 0.0) || c_step > 1.0) throw DomainError("c_step must lie in (0, 1]");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw DomainError("integrator tolerances must be > 0");
  if (record_every < 1) throw DomainError("record_every must be >= 1");
  if (paths < 1) throw DomainError("path count must be >= 1");
}

double IntegratorConfig::step_cap(const SpectralField& u) const {
  const int m = step_norm_index >= 0 ? step_norm_index : (u.is_shell() ? 1 : 4);
  return c_step / (1.0 + hs_norm(u, m));
}

const std::vector<double>& TrajectoryRecord::at(const std::string& name) const {
  auto it = series.find(name);
  if (it == series.end()) throw DataError("trajectory has no recorded series '" + name + "'");
  return it->second;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695, kE4 = kB4 - 393.0 / 640,
                 kE5 = kB5 - -92097.0 / 339200, kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;

constexpr double kMinStep = 1e-12;

class Drift {
 public:
  Drift(const ModelSpec& model, const SpectralField& like) : model_(model), work_(like.zeros_like()) {}
  Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& y) {
    work_.coeffs() = y;
    return galerkin_drift(model_, work_).coeffs();
  }

 private:
  const ModelSpec& model_;
  SpectralField work_;
};

SpectralField with_coeffs(const SpectralField& like, const Eigen::MatrixXcd& c) {
  SpectralField out = like.zeros_like();
  out.coeffs() = c;
  return out;
}

void require_finite(const SpectralField& u, double t) {
  if (!u.all_finite()) {
    std::ostringstream msg;
    msg << "state became nonfinite at t = " << t;
    throw DivergenceError(msg.str());
  }
}

struct Recorder {
  const ModelSpec& model;
  const std::vector<NamedObserver>& observers;
  bool keep;
  TrajectoryRecord& rec;

  void operator()(double t, const SpectralField& u) {
    rec.times.push_back(t);
    rec.series["l2sq"].push_back(l2_norm_sq(u));
    if (has_secondary_hamiltonian(model)) rec.series["H"].push_back(secondary_hamiltonian(model, u));
    for (const auto& o : observers) rec.series[o.name].push_back(o.f(u));
    if (keep) rec.snapshots.push_back(u);
  }
};

// One classical RK4 step of the transport drift.
SpectralField rk4(const ModelSpec& model, const SpectralField& u, double h) {
  Drift f(model, u);
  const Eigen::MatrixXcd& y = u.coeffs();
  const Eigen::MatrixXcd k1 = f(y);
  const Eigen::MatrixXcd k2 = f(y + 0.5 * h * k1);
  const Eigen::MatrixXcd k3 = f(y + 0.5 * h * k2);
  const Eigen::MatrixXcd k4 = f(y + h * k3);
  return with_coeffs(u, y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace

FlowResult deterministic_flow(const ModelSpec& model, const SpectralField& u0, double t0, double t1,
                              const IntegratorConfig& cfg, const FlowOptions& options) {
  cfg.validate();
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> outputs = options.output_times;
  if (outputs.empty()) outputs = {t0, t1};
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double s = outputs[i];
    if ((s - t0) * dir < 0.0 || (t1 - s) * dir < 0.0) throw DomainError("output time outside the integration span");
    if (i > 0 && (s - outputs[i - 1]) * dir < 0.0) throw DomainError("output times must follow the integration direction");
  }

  FlowResult result;
  result.record.stream = cfg.seed;
  Recorder record{model, options.observers, options.keep_snapshots, result.record};
  Drift f(model, u0);

  Eigen::MatrixXcd y = u0.coeffs();
  double t = t0;
  std::size_t next = 0;
  Eigen::MatrixXcd k1 = f(y);
  double hmag = std::min(cfg.dt, cfg.dt_max);

  while (next < outputs.size()) {
    const double target = outputs[next];
    if (t == target) {
      record(t, with_coeffs(u0, y));
      ++next;
      continue;
    }
    const double cap = std::min(cfg.dt_max, cfg.step_cap(with_coeffs(u0, y)));
    double h = std::min(hmag, cap);
    const bool clipped = h >= std::abs(target - t);
    if (clipped) h = std::abs(target - t);
    const double hs = dir * h;

    const Eigen::MatrixXcd k2 = f(y + hs * (kA21 * k1));
    const Eigen::MatrixXcd k3 = f(y + hs * (kA31 * k1 + kA32 * k2));
    const Eigen::MatrixXcd k4 = f(y + hs * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Eigen::MatrixXcd k5 = f(y + hs * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Eigen::MatrixXcd k6 = f(y + hs * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const Eigen::MatrixXcd y5 = y + hs * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Eigen::MatrixXcd k7 = f(y5);
    const Eigen::MatrixXcd err = hs * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    const Eigen::ArrayXXd scale = cfg.atol + cfg.rtol * y.cwiseAbs().array().max(y5.cwiseAbs().array());
    const double err_norm = std::sqrt((err.cwiseAbs().array() / scale).square().mean());
    if (!std::isfinite(err_norm)) throw DivergenceError("nonfinite error estimate in the adaptive flow");

    const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    if (err_norm <= 1.0) {
      t = clipped ? target : t + hs;
      y = y5;
      k1 = k7;
      ++result.record.steps;
      require_finite(with_coeffs(u0, y), t);
      // A clipped step says nothing about the natural step size.
      hmag = clipped ? std::max(hmag, h * factor) : h * factor;
    } else {
      hmag = h * std::min(factor, 0.9);
      if (hmag < kMinStep) {
        std::ostringstream msg;
        msg << "adaptive step fell below " << kMinStep << " at t = " << t;
        throw StiffnessError(msg.str());
      }
    }
  }
  result.final_state = with_coeffs(u0, y);
  return result;
}

FlowResult stochastic_path(const FDSystem& sys, const SpectralField& u0, double t0, double t1,
                           const IntegratorConfig& cfg, std::mt19937_64& rng, const PathOptions& options) {
  cfg.validate();
  if (sys.alpha < 0.0) throw DomainError("alpha must be >= 0");
  if (!(t1 > t0)) throw DomainError("stochastic paths run forward in time (t1 > t0)");
  const long n_steps = std::max(1L, std::lround((t1 - t0) / cfg.dt));
  const double h = (t1 - t0) / static_cast<double>(n_steps);
  auto recorded = [&](long n) { return n % cfg.record_every == 0 || n == n_steps; };

  if (sys.alpha == 0.0) {
    FlowOptions fo;
    for (long n = 0; n <= n_steps; ++n) {
      if (recorded(n)) fo.output_times.push_back(n == n_steps ? t1 : t0 + static_cast<double>(n) * h);
    }
    fo.observers = options.observers;
    fo.keep_snapshots = options.keep_snapshots || static_cast<bool>(options.on_record);
    FlowResult res = deterministic_flow(sys.model, u0, t0, t1, cfg, fo);
    if (options.on_record) {
      for (std::size_t i = 0; i < res.record.times.size(); ++i) options.on_record(res.record.times[i], res.record.snapshots[i]);
      if (!options.keep_snapshots) res.record.snapshots.clear();
    }
    return res;
  }

  sys.diss.validate();
  const NoiseModel noise(sys.noise, u0);
  std::vector<double> rate(static_cast<std::size_t>(u0.size()), 0.0);
  if (sys.diss.a1) {
    for (int i = 0; i < u0.size(); ++i) rate[static_cast<std::size_t>(i)] = linear_rate(sys.diss, u0, i);
  }

  FlowResult result;
  TrajectoryRecord& rec = result.record;
  double int_g = 0.0, mart = 0.0;
  const std::size_t nf = options.balance.size();
  std::vector<double> s_f1g(nf, 0.0), s_f1(nf, 0.0), s_f2q(nf, 0.0), s_f1m(nf, 0.0);
  std::normal_distribution<double> gauss;
  bool warned = false;

  SpectralField u = u0;
  for (long n = 0;; ++n) {
    const double t = n == n_steps ? t1 : t0 + static_cast<double>(n) * h;
    const double e = l2_norm_sq(u);
    const double g = G_potential(sys.diss, u);
    const double q = noise.quadratic_form(u);
    if (recorded(n)) {
      rec.times.push_back(t);
      rec.series["l2sq"].push_back(e);
      rec.series["G"].push_back(g);
      rec.series["Q"].push_back(q);
      rec.series["int_G"].push_back(int_g);
      rec.series["martingale"].push_back(mart);
      for (std::size_t j = 0; j < nf; ++j) {
        const std::string key = "bal/" + options.balance[j].name + "/";
        rec.series[key + "F"].push_back(options.balance[j].F(e));
        rec.series[key + "F1G"].push_back(s_f1g[j]);
        rec.series[key + "F1"].push_back(s_f1[j]);
        rec.series[key + "F2Q"].push_back(s_f2q[j]);
        rec.series[key + "F1M"].push_back(s_f1m[j]);
      }
      for (const auto& o : options.observers) rec.series[o.name].push_back(o.f(u));
      if (options.keep_snapshots) rec.snapshots.push_back(u);
      if (options.on_record) options.on_record(t, u);
    }
    if (n == n_steps) break;

    int_g += g * h;
    std::vector<double> f1(nf);
    for (std::size_t j = 0; j < nf; ++j) {
      f1[j] = options.balance[j].F1(e);
      s_f1g[j] += f1[j] * g * h;
      s_f1[j] += f1[j] * h;
      s_f2q[j] += options.balance[j].F2(e) * q * h;
    }

    // Transport, subdivided to respect the step cap.
    const double cap = std::min(cfg.dt_max, cfg.step_cap(u));
    const long nsub = std::max(1L, static_cast<long>(std::ceil(h / cap)));
    for (long s = 0; s < nsub; ++s) u = rk4(sys.model, u, h / static_cast<double>(nsub));

    // Damped explicit a2/a3 substeps, halved until contractive.
    if (sys.diss.has_nonlinear()) {
      double remaining = h;
      while (remaining > 0.0) {
        const SpectralField a = nonlinear_part(sys.diss, u) * (sys.alpha * dissipation_prefactor(sys.diss, u));
        const double pair = inner_product(a, u);
        const double an2 = l2_norm_sq(a);
        double hh = remaining;
        int halvings = 0;
        if (an2 > 0.0 && pair > 0.0) {
          const double limit = 0.9 * 2.0 * pair / an2;
          while (hh > limit && halvings < 200) {
            hh *= 0.5;
            ++halvings;
          }
        }
        if (halvings > 20) {
          ++rec.halving_warnings;
          if (!warned) {
            std::clog << "warning: dissipation substep halved " << halvings << " times at t = " << t << "\n";
            warned = true;
          }
        }
        u -= hh * a;
        remaining = hh >= remaining ? 0.0 : remaining - hh;
      }
    }

    // Exact OU step for the a1 part with the prefactor frozen, plus noise.
    const double theta = dissipation_prefactor(sys.diss, u);
    SpectralField eta = u.zeros_like();
    if (sys.diss.a1) {
      for (int i = 0; i < u.size(); ++i) {
        u.coeffs().row(i) *= std::exp(-sys.alpha * theta * rate[static_cast<std::size_t>(i)] * h);
      }
    }
    for (int k = 0; k < noise.size(); ++k) {
      const double z = gauss(rng);
      const double a = noise.amplitude(k);
      if (a == 0.0) continue;
      double sd = a * std::sqrt(sys.alpha * h);
      if (sys.diss.a1) {
        const double lam = theta * rate[static_cast<std::size_t>(noise.mode(k))];
        sd = a * std::sqrt(-std::expm1(-2.0 * sys.alpha * lam * h) / (2.0 * lam));
      }
      noise.add(eta, k, sd * z);
    }
    const double m = 2.0 * inner_product(u, eta);
    mart += m;
    for (std::size_t j = 0; j < nf; ++j) s_f1m[j] += f1[j] * m;
    u += eta;
    ++rec.steps;
    require_finite(u, t + h);
  }
  result.final_state = u;
  return result;
}

FlowResult stochastic_path(const FDSystem& sys, const SpectralField& u0, double t1, const IntegratorConfig& cfg,
                           std::uint64_t stream, const PathOptions& options) {
  std::mt19937_64 rng(stream_seed(cfg.seed, stream));
  FlowResult res = stochastic_path(sys, u0, 0.0, t1, cfg, rng, options);
  res.record.stream = stream;
  return res;
}

bool ConvergenceTable::nonincreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].error > rows[i - 1].error) return false;
  }
  return true;
}

bool ConvergenceTable::strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].error < rows[i - 1].error)) return false;
  }
  return true;
}

ConvergenceTable galerkin_convergence_test(const ModelSpec& model, const SpectralField& u0_ref,
                                           const std::vector<int>& cutoffs, double horizon,
                                           const IntegratorConfig& cfg, int samples, double s) {
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] >= u0_ref.cutoff()) throw DomainError("convergence cutoffs must lie below the reference");
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) throw DomainError("convergence cutoffs must increase");
  }
  FlowOptions fo;
  for (int k = 0; k < samples; ++k) fo.output_times.push_back(horizon * k / samples);
  fo.output_times.push_back(horizon);
  fo.keep_snapshots = true;

  ModelSpec ref_model = model;
  ref_model.truncation = u0_ref.cutoff();
  const FlowResult ref = deterministic_flow(ref_model, u0_ref, 0.0, horizon, cfg, fo);

  ConvergenceTable table;
  table.reference_cutoff = u0_ref.cutoff();
  table.horizon = horizon;
  table.sobolev_index = s;
  for (int n : cutoffs) {
    ModelSpec m = model;
    m.truncation = n;
    const FlowResult run = deterministic_flow(m, galerkin_project(u0_ref, n), 0.0, horizon, cfg, fo);
    double worst = 0.0;
    for (std::size_t k = 0; k < run.record.snapshots.size(); ++k) {
      const SpectralField diff = ref.record.snapshots[k] - galerkin_embed(run.record.snapshots[k], u0_ref.cutoff());
      worst = std::max(worst, hs_norm(diff, s));
    }
    table.rows.push_back({n, worst});
  }
  return table;
}

namespace {

// sup of |u(t)|_{H^m} / |u0|_{H^m} over `samples` + 1 times in [0, T], and the
// first sampled time at which the ratio exceeds 2 (or T when it never does).
std::pair<double, double> growth_profile(const ModelSpec& model, const SpectralField& u0, double m, double horizon,
                                         const IntegratorConfig& cfg, int samples) {
  FlowOptions fo;
  for (int k = 0; k < samples; ++k) fo.output_times.push_back(horizon * k / samples);
  fo.output_times.push_back(horizon);
  fo.observers.push_back({"hm", [m](const SpectralField& u) { return hs_norm(u, m); }});
  const FlowResult run = deterministic_flow(model, u0, 0.0, horizon, cfg, fo);
  const double n0 = hs_norm(u0, m);
  const auto& hm = run.record.at("hm");
  double sup = 0.0, first = horizon;
  bool crossed = false;
  for (std::size_t k = 0; k < hm.size(); ++k) {
    sup = std::max(sup, hm[k] / n0);
    if (!crossed && hm[k] > 2.0 * n0) {
      first = k == 0 ? 0.0 : run.record.times[k - 1];
      crossed = true;
    }
  }
  return {sup, first};
}

}  // namespace

LocalTimeCalibration calibrate_local_time(const ModelSpec& model, const std::vector<SpectralField>& fit,
                                          const std::vector<SpectralField>& validation, double m,
                                          const IntegratorConfig& cfg, double safety, double c_max) {
  LocalTimeCalibration cal;
  cal.safety = safety;
  cal.sobolev_index = m;
  cal.fitted_min = c_max;
  for (const auto& u0 : fit) {
    const double n0 = hs_norm(u0, m);
    if (n0 == 0.0) continue;
    const auto [sup, first] = growth_profile(model, u0, m, c_max / n0, cfg, 200);
    (void)sup;
    cal.fitted_min = std::min(cal.fitted_min, first * n0);
  }
  cal.c_T = safety * cal.fitted_min;
  cal.validated = true;
  for (const auto& v : validation) {
    const double n0 = hs_norm(v, m);
    if (n0 == 0.0) continue;
    const auto [sup, first] = growth_profile(model, v, m, cal.c_T / n0, cfg, 50);
    (void)first;
    cal.validation_ratio = std::max(cal.validation_ratio, sup);
  }
  cal.validated = cal.validation_ratio <= 2.0;
  return cal;
}

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_snapshot(out, cp.state);
  out.write(reinterpret_cast<const char*>(&cp.time), sizeof(double));
  std::ostringstream state;
  state << cp.rng;
  const std::string text = state.str();
  const auto len = static_cast<std::uint32_t>(text.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Checkpoint cp;
  cp.state = read_snapshot(in);
  std::uint32_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&cp.time), sizeof(double)) ||
      !in.read(reinterpret_cast<char*>(&len), sizeof(len))) {
    throw IoError("truncated checkpoint " + path);
  }
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw IoError("truncated checkpoint " + path);
  std::istringstream state(text);
  state >> cp.rng;
  if (!state) throw IoError("bad RNG state in checkpoint " + path);
  return cp;
}

}  // namespace imlab
