#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "imlab/ensemble.hpp"
#include "imlab/errors.hpp"
#include "imlab/spectral_ops.hpp"

using namespace imlab;

namespace {

EnsembleSpec small_spec() {
  EnsembleSpec s;
  s.i = 1;
  s.j = 1;
  s.r = 4.0;
  s.c_T = 0.5;
  return s;
}

// A single excited shell is a fixed point of the shell flow: every triad
// involves at least one empty neighbour.
SpectralField single_shell(const ModelSpec& m, int n, double h4) {
  SpectralField u = m.state_space().zeros_like();
  u.at(n) = Complex(1.0, 0.0);
  u *= h4 / hs_norm(u, 4.0);
  return u;
}

}  // namespace

TEST_CASE("ensemble spec geometry") {
  const EnsembleSpec s = small_spec();
  CHECK(s.radius() == doctest::Approx(xi(s.diss, 2.0)));
  CHECK(s.local_time() == doctest::Approx(s.c_T / s.radius()));
  CHECK(s.horizon() == doctest::Approx(std::exp(1.0)));
  EnsembleSpec bad = s;
  bad.c_T = 0.0;
  CHECK_THROWS(bad.validate());
  const std::vector<double> grid = slow_growth_grid(s, 10);
  CHECK(grid.size() == 11);
  CHECK(grid.back() == s.horizon());
}

TEST_CASE("sigma membership: origin, boundary and just outside") {
  const ModelSpec m = ModelSpec::sabra(8);
  const EnsembleSpec s = small_spec();
  const IntegratorConfig cfg;
  const SigmaMembership zero = sigma_membership(m.state_space(), s, m, cfg);
  CHECK(zero.member);
  CHECK(zero.max_norm == 0.0);

  SpectralField edge = single_shell(m, 3, s.radius());
  if (hs_norm(edge, s.r) > s.radius()) edge *= std::nextafter(1.0, 0.0);
  CHECK(ball_membership(edge, s));
  CHECK(sigma_i_membership(edge, s, m, cfg).member);

  const SpectralField out = single_shell(m, 3, 1.01 * s.radius());
  CHECK_FALSE(ball_membership(out, s));
  const SigmaMembership o = sigma_membership(out, s, m, cfg);
  CHECK_FALSE(o.member);
  CHECK(o.first_violation == 0);
}

TEST_CASE("slow growth runs only on members") {
  const ModelSpec m = ModelSpec::sabra(8);
  const EnsembleSpec s = small_spec();
  const IntegratorConfig cfg;
  const SlowGrowth skip = slow_growth_check(single_shell(m, 3, 2 * s.radius()), s, m, slow_growth_grid(s, 5), cfg);
  CHECK_FALSE(skip.checked);
  CHECK_FALSE(skip.pass);

  std::mt19937_64 rng(2);
  SpectralField u = random_field(m.state_space(), rng);
  u *= 0.1 * s.radius() / hs_norm(u, s.r);
  std::vector<double> grid = slow_growth_grid(s, 8);
  for (std::size_t k = 1; k < 9; ++k) grid.push_back(-grid[k]);
  const SlowGrowth g = slow_growth_check(u, s, m, grid, cfg);
  CHECK(g.checked);
  CHECK(g.pass);
  CHECK(g.max_ratio < 1.0);
}

TEST_CASE("harvest complement fractions") {
  const ModelSpec m = ModelSpec::sabra(8);
  const EnsembleSpec s = small_spec();
  const IntegratorConfig cfg;
  std::vector<SpectralField> snaps{m.state_space(), single_shell(m, 2, 4.5),
                                   single_shell(m, 2, 10.8), single_shell(m, 2, 100.0)};
  const Harvest h = ensemble_harvest(snaps, s, m, cfg, {1, 2, 3});
  REQUIRE(h.rows.size() == 3);
  // Radii 6, 9, 12 against fixed points of norm 0, 4.5, 10.8 and 100.
  CHECK(h.rows[0].members == 2);
  CHECK(h.rows[1].members == 2);
  CHECK(h.rows[2].members == 3);
  CHECK(h.rows[0].complement_fraction == doctest::Approx(0.5));
  CHECK(h.rows[2].complement_fraction == doctest::Approx(0.25));
  CHECK(h.rows[2].member_indices == std::vector<int>{0, 1, 2});
  CHECK(h.monotone.passed());

  const Harvest empty = ensemble_harvest({}, s, m, cfg, {1, 2});
  CHECK(empty.monotone.status == Status::Inconclusive);
  for (const auto& r : empty.rows) CHECK_FALSE(r.defined);
}

TEST_CASE("regularity persistence on a Beltrami flow and for m = 0") {
  const ModelSpec m = ModelSpec::euler3d(3);
  // u = (sin z, cos z, 0) is a steady Beltrami field.
  SpectralField abc = m.state_space().zeros_like();
  abc.set_real_mode({0, 0, 1}, Complex(0.0, -0.5), 0);
  abc.set_real_mode({0, 0, 1}, Complex(0.5, 0.0), 1);
  CHECK(divergence_defect(abc) == 0.0);
  const IntegratorConfig cfg;
  const DissipationSpec diss;
  for (const auto& row : regularity_persistence_check(abc, m, {1.0, 2.0, 4.0}, 1.0, diss, cfg, 5)) {
    CHECK(row.pass);
    CHECK(row.c_tilde == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(row.max_ratio == doctest::Approx(1.0).epsilon(1e-10));
  }

  std::mt19937_64 rng(8);
  const SpectralField u = random_field(m.state_space(), rng);
  const auto rows = regularity_persistence_check(u, m, {0.0}, 0.5, diss, cfg, 5);
  CHECK(rows[0].pass);
  CHECK(rows[0].max_ratio == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(regularity_persistence_check(SpectralField::shell(4), ModelSpec::sabra(4), {1.0}, 1.0, diss, cfg),
                  CapabilityError);
}
