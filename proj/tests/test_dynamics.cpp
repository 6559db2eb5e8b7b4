#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "imlab/errors.hpp"
#include "imlab/integrator.hpp"
#include "imlab/noise.hpp"
#include "imlab/spectral_ops.hpp"
#include "imlab/statistics.hpp"

using namespace imlab;

namespace {

FDSystem sabra_system(int shells, double alpha) {
  FDSystem sys;
  sys.model = ModelSpec::sabra(shells);
  sys.diss = DissipationSpec::linear_only();
  sys.noise = NoiseSpec::exponential();
  sys.alpha = alpha;
  return sys;
}

}  // namespace

TEST_CASE("noise directions are orthonormal and carry A0N") {
  for (const SpectralField& space : {SpectralField::torus_scalar(2, 5), SpectralField::torus_vector(3, 3, 3),
                                     SpectralField::shell(6)}) {
    const NoiseModel noise(NoiseSpec::exponential(), space);
    double a0 = 0.0;
    for (int i = 0; i < space.size(); ++i) a0 += std::pow(std::exp(-0.7 * (space.is_shell() ? i + 1 : space.wavenumber(i))), 2);
    CHECK(noise.total_variance() == doctest::Approx(a0).epsilon(1e-13));
    for (int k = 0; k < noise.size(); ++k) {
      const SpectralField pk = noise.direction(k);
      CHECK(pk.reality_defect() == 0.0);
      CHECK(divergence_defect(pk) < 1e-15);
      for (int j = 0; j < noise.size(); ++j) {
        const double ip = inner_product(pk, noise.direction(j));
        CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-13);
      }
      CHECK(noise.project(pk, k) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("noise increments") {
  std::mt19937_64 rng(77);
  const SpectralField space = SpectralField::torus_scalar(2, 2);
  CHECK(NoiseModel(NoiseSpec::zero(), space).increment(0.1, rng).coeffs().norm() == 0.0);
  CHECK_THROWS_AS(NoiseModel(NoiseSpec::zero(), space).increment(0.0, rng), DomainError);

  // Variance of each orthonormal coordinate is a_k^2 dt.
  const NoiseModel noise(NoiseSpec::exponential(), space);
  const double dt = 0.01;
  std::vector<RunningStats> stats(static_cast<std::size_t>(noise.size()));
  for (int draw = 0; draw < 100000; ++draw) {
    const SpectralField inc = noise.increment(dt, rng);
    for (int k = 0; k < noise.size(); ++k) stats[static_cast<std::size_t>(k)].push(noise.project(inc, k));
  }
  for (int k = 0; k < noise.size(); ++k) {
    const double target = noise.amplitude(k) * noise.amplitude(k) * dt;
    // Standard error of a Gaussian sample variance: target sqrt(2 / n).
    CHECK(std::abs(stats[static_cast<std::size_t>(k)].variance() - target) <= 3.0 * target * std::sqrt(2.0 / 1e5));
  }

  const NoiseModel vec(NoiseSpec::exponential(), SpectralField::torus_vector(3, 4, 3));
  const SpectralField inc = vec.increment(0.3, rng);
  CHECK(divergence_defect(inc) < 1e-15);
}

TEST_CASE("pathwise Q(u) <= A0N |u|^2") {
  std::mt19937_64 rng(5);
  for (const SpectralField& space : {SpectralField::torus_scalar(2, 8), SpectralField::shell(10)}) {
    const NoiseModel noise(NoiseSpec::exponential(), space);
    for (int t = 0; t < 50; ++t) {
      const SpectralField u = random_field(space, rng);
      CHECK(noise.quadratic_form(u) <= noise.total_variance() * l2_norm_sq(u) * (1 + 1e-14));
    }
  }
}

TEST_CASE("deterministic Sabra conserves energy and H") {
  const ModelSpec spec = ModelSpec::sabra(12);
  std::mt19937_64 rng(12);
  const SpectralField u0 = random_field(spec.state_space(), rng, 0.3);
  IntegratorConfig cfg;
  const FlowResult run = deterministic_flow(spec, u0, 0.0, 10.0, cfg);
  const double e0 = l2_norm_sq(u0);
  CHECK(std::abs(l2_norm_sq(run.final_state) - e0) <= 1e-6 * e0);
  const double h0 = secondary_hamiltonian(spec, u0);
  CHECK(std::abs(secondary_hamiltonian(spec, run.final_state) - h0) <= 1e-6 * std::abs(h0));
  CHECK(run.record.times.front() == 0.0);
  CHECK(run.record.times.back() == 10.0);

  const FlowResult zero = deterministic_flow(spec, spec.state_space(), 0.0, 10.0, cfg);
  CHECK(zero.final_state.coeffs().norm() == 0.0);
}

TEST_CASE("time reversal") {
  const ModelSpec spec = ModelSpec::euler2d(8);
  std::mt19937_64 rng(13);
  const SpectralField u0 = random_field(spec.state_space(), rng);
  IntegratorConfig cfg;
  const SpectralField back = deterministic_flow(spec, u0, 0.0, -1.0, cfg).final_state;
  const SpectralField flipped = -deterministic_flow(spec, -u0, 0.0, 1.0, cfg).final_state;
  CHECK((back.coeffs() - flipped.coeffs()).norm() <= 1e-8 * u0.coeffs().norm());
  // And forward after backward returns to the start.
  const SpectralField again = deterministic_flow(spec, back, -1.0, 0.0, cfg).final_state;
  CHECK((again.coeffs() - u0.coeffs()).norm() <= 1e-8 * u0.coeffs().norm());
}

TEST_CASE("output times are hit exactly and validated") {
  const ModelSpec spec = ModelSpec::sabra(6);
  std::mt19937_64 rng(14);
  const SpectralField u0 = random_field(spec.state_space(), rng);
  FlowOptions fo;
  fo.output_times = {0.0, 0.3, 0.7, 1.0};
  fo.keep_snapshots = true;
  const FlowResult run = deterministic_flow(spec, u0, 0.0, 1.0, IntegratorConfig{}, fo);
  CHECK(run.record.times == fo.output_times);
  CHECK(run.record.snapshots.size() == 4);
  fo.output_times = {0.5, 0.2};
  CHECK_THROWS_AS(deterministic_flow(spec, u0, 0.0, 1.0, IntegratorConfig{}, fo), DomainError);
}

TEST_CASE("alpha = 0 reduces to the deterministic flow") {
  FDSystem sys = sabra_system(8, 0.0);
  std::mt19937_64 rng(15);
  const SpectralField u0 = random_field(sys.model.state_space(), rng);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.record_every = 10;
  const FlowResult sto = stochastic_path(sys, u0, 1.0, cfg, 0);
  FlowOptions fo;
  fo.output_times = sto.record.times;
  const FlowResult det = deterministic_flow(sys.model, u0, 0.0, 1.0, cfg, fo);
  CHECK((sto.final_state.coeffs() - det.final_state.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(sto.record.times.size() == 11);
}

TEST_CASE("stochastic paths are reproducible and resumable") {
  const FDSystem sys = sabra_system(8, 0.5);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.seed = 99;
  const SpectralField u0 = sys.model.state_space();
  const FlowResult a = stochastic_path(sys, u0, 0.2, cfg, 3);
  const FlowResult b = stochastic_path(sys, u0, 0.2, cfg, 3);
  CHECK(a.final_state.coeffs() == b.final_state.coeffs());
  CHECK(a.record.series == b.record.series);
  const FlowResult c = stochastic_path(sys, u0, 0.2, cfg, 4);
  CHECK(a.final_state.coeffs() != c.final_state.coeffs());

  // Split at t = 0.1 through a checkpoint file.
  std::mt19937_64 rng(stream_seed(cfg.seed, 3));
  const FlowResult first = stochastic_path(sys, u0, 0.0, 0.1, cfg, rng);
  const auto path = std::filesystem::temp_directory_path() / "imlab_checkpoint_test.bin";
  save_checkpoint(path.string(), {first.final_state, 0.1, rng});
  Checkpoint cp = load_checkpoint(path.string());
  std::filesystem::remove(path);
  CHECK(cp.time == 0.1);
  const FlowResult second = stochastic_path(sys, cp.state, cp.time, 0.2, cfg, cp.rng);
  CHECK((second.final_state.coeffs() - a.final_state.coeffs()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Ito balance residuals") {
  const FDSystem sys = sabra_system(8, 0.5);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.record_every = 50;
  PathOptions opts;
  opts.balance = {BalanceFunction::identity(), BalanceFunction::power(2), BalanceFunction::constant(2.0)};
  std::vector<TrajectoryRecord> paths;
  for (int p = 0; p < 16; ++p) paths.push_back(stochastic_path(sys, sys.model.state_space(), 0.5, cfg, p, opts).record);
  const double a0 = NoiseModel(sys.noise, sys.model.state_space()).total_variance();

  const BalanceSeries lin = ito_balance_residual(BalanceFunction::identity(), paths, sys.alpha, a0);
  for (std::size_t k = 1; k < lin.t.size(); ++k) {
    // First order splitting bias is a few percent of the terms at this dt.
    CHECK(std::abs(lin.mean[k]) <= 0.05 * lin.scale[k] + 4.0 * lin.std_error[k]);
  }
  const BalanceSeries cst = ito_balance_residual(BalanceFunction::constant(2.0), paths, sys.alpha, a0);
  for (double r : cst.mean) CHECK(r == 0.0);
  const BalanceSeries sq = ito_balance_residual(BalanceFunction::power(2), paths, sys.alpha, a0);
  CHECK(std::abs(sq.mean.back()) <= 0.1 * sq.scale.back() + 4.0 * sq.std_error.back());

  CHECK_THROWS_AS(ito_balance_residual(BalanceFunction::power(3), paths, sys.alpha, a0), DataError);
  CHECK_THROWS_AS(ito_balance_residual(BalanceFunction::identity(), {}, sys.alpha, a0), DataError);
}

TEST_CASE("Galerkin convergence table on shells") {
  const ModelSpec spec = ModelSpec::sabra(12);
  SpectralField u0 = spec.state_space();
  u0.at(0) = 0.3;
  u0.at(1) = Complex(0.1, 0.2);
  IntegratorConfig cfg;
  const ConvergenceTable table = galerkin_convergence_test(spec, u0, {4, 8, 10}, 0.5, cfg, 10);
  CHECK(table.nonincreasing());
  CHECK(table.rows.front().error > 0.0);
  CHECK(table.rows.back().error < table.rows.front().error);

  const ConvergenceTable at_zero = galerkin_convergence_test(spec, u0, {4, 8}, 0.0, cfg, 1);
  for (const auto& row : at_zero.rows) CHECK(row.error == 0.0);
}

TEST_CASE("local time calibration") {
  const ModelSpec spec = ModelSpec::sabra(8);
  std::mt19937_64 rng(21);
  std::vector<SpectralField> fit, val;
  for (int i = 0; i < 20; ++i) fit.push_back(random_field(spec.state_space(), rng, 0.2));
  for (int i = 0; i < 20; ++i) val.push_back(random_field(spec.state_space(), rng, 0.2));
  const LocalTimeCalibration cal = calibrate_local_time(spec, fit, val, 1.0, IntegratorConfig{});
  CHECK(cal.c_T > 0.0);
  CHECK(cal.validated);
  CHECK(cal.validation_ratio <= 2.0);
}

TEST_CASE("running statistics merge associatively") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(2.0, 3.0);
  RunningStats all, a, b;
  for (int i = 0; i < 1000; ++i) {
    const double x = g(rng);
    all.push(x);
    (i % 3 == 0 ? a : b).push(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));

  const std::vector<double> series{1, 2, 3, 4, 5, 6, 7};
  CHECK(batch_means(series, 3) == std::vector<double>{1.5, 3.5, 5.5});
}

TEST_CASE("reservoir inclusion is uniform") {
  const int capacity = 10, stream = 100, trials = 20000;
  std::vector<int> hits(stream, 0);
  for (int t = 0; t < trials; ++t) {
    Reservoir<int> r(capacity, stream_seed(7, t));
    for (int i = 0; i < stream; ++i) r.offer(i);
    for (int v : r.items()) ++hits[static_cast<std::size_t>(v)];
  }
  const double p = static_cast<double>(capacity) / stream;
  const double sd = std::sqrt(trials * p * (1 - p));
  for (int h : hits) CHECK(std::abs(h - trials * p) <= 5.0 * sd);
}
