#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "imlab/dissipation.hpp"
#include "imlab/errors.hpp"
#include "imlab/spectral_ops.hpp"

using namespace imlab;

TEST_CASE("single mode linear dissipation") {
  DissipationSpec spec = DissipationSpec::linear_only();
  SpectralField u = SpectralField::torus_scalar(2, 8);
  u.set_real_mode({1, 2, 0}, Complex(0.05, -0.02));
  const double l2 = std::sqrt(l2_norm_sq(u));
  // exp(rho(|m|^{s*} |u|)) |m|^{2 s1*} u with |m|^2 = 5, rho(x) = x.
  const double factor = std::exp(std::pow(5.0, 2.0) * l2) * std::pow(5.0, 5.0);
  const SpectralField a = apply_A(spec, u);
  CHECK((a.coeffs() - factor * u.coeffs()).norm() <= 1e-13 * factor * u.coeffs().norm());
  CHECK(apply_A(spec, u.zeros_like()).coeffs().norm() == 0.0);
  CHECK(G_potential(spec, u.zeros_like()) == 0.0);
}

TEST_CASE("duality <A(u), u> = G(u)") {
  std::mt19937_64 rng(101);
  DissipationSpec spec;
  spec.rho = RhoSpec::linear(0.1);
  int checked = 0;
  for (const SpectralField& space : {SpectralField::torus_scalar(2, 8), SpectralField::torus_vector(3, 3, 3),
                                     SpectralField::torus_scalar(1, 16)}) {
    for (int t = 0; t < 34; ++t) {
      SpectralField u = random_field(space, rng, 0.5);
      u *= 0.05 / std::sqrt(l2_norm_sq(u));
      const double g = G_potential(spec, u);
      const double pair = inner_product(apply_A(spec, u), u);
      CHECK(std::abs(pair - g) <= 1e-8 * (1.0 + g));
      CHECK(g > 0.0);
      ++checked;
    }
  }
  CHECK(checked == 102);

  // Each term on its own.
  for (int mask = 1; mask < 8; ++mask) {
    DissipationSpec d;
    d.a1 = mask & 1;
    d.a2 = mask & 2;
    d.a3 = mask & 4;
    SpectralField u = random_field(SpectralField::torus_scalar(2, 5), rng, 0.5);
    u *= 0.1 / std::sqrt(l2_norm_sq(u));
    const double g = G_potential(d, u);
    CHECK(std::abs(inner_product(apply_A(d, u), u) - g) <= 1e-8 * (1.0 + g));
  }
}

TEST_CASE("shells only support the linear term") {
  std::mt19937_64 rng(3);
  SpectralField s = random_field(SpectralField::shell(4), rng);
  s *= 1e-3;
  CHECK_THROWS_AS(apply_A(DissipationSpec{}, s), CapabilityError);
  CHECK_THROWS_AS(G_potential(DissipationSpec{}, s), CapabilityError);
  const DissipationSpec lin = DissipationSpec::linear_only();
  CHECK(std::abs(inner_product(apply_A(lin, s), s) - G_potential(lin, s)) <= 1e-10 * G_potential(lin, s));
}

TEST_CASE("monotone exhaustion and superlinearity") {
  std::mt19937_64 rng(7);
  DissipationSpec spec;
  spec.rho = RhoSpec::linear(0.05);
  SpectralField u = random_field(SpectralField::torus_scalar(2, 16), rng, 0.6);
  u *= 0.05 / std::sqrt(l2_norm_sq(u));
  double prev = 0.0;
  for (int n : {1, 2, 4, 5, 8, 10, 13, 16}) {
    const double g = G_potential(spec, galerkin_project(u, n));
    CHECK(g >= prev);
    prev = g;
  }
  CHECK(prev == doctest::Approx(G_potential(spec, u)).epsilon(1e-14));
  for (double c : {1.0, 1.5, 3.0}) CHECK(G_potential(spec, c * u) >= c * c * G_potential(spec, u));
}

TEST_CASE("xi and rho") {
  DissipationSpec spec;
  spec.rho = RhoSpec::linear(3.0);
  CHECK(xi(spec, 2.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(xi(spec, 0.0) == 0.0);
  CHECK_THROWS_AS(xi(spec, -1.0), DomainError);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pick(0.0, 20.0);
  for (const RhoSpec& rho : {RhoSpec::linear(1.0), RhoSpec::affine_exp(0.5, 0.2, 0.3)}) {
    spec.rho = rho;
    for (int t = 0; t < 100; ++t) {
      const double y = pick(rng);
      CHECK(xi(spec, rho(y) / 3.0) == doctest::Approx(y).epsilon(1e-12));
      CHECK(xi(spec, xi_inverse(spec, y)) == doctest::Approx(y).epsilon(1e-12));
    }
  }
  // Default rho(x) = x gives xi(x) = 3x.
  CHECK(xi(DissipationSpec{}, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("validation") {
  DissipationSpec d;
  d.q = 5;
  CHECK_THROWS_WITH_AS(d.validate(), doctest::Contains("even"), DomainError);
  d = {};
  d.s1_star = 4.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
  d = {};
  d.s_star = 3.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
  d = {};
  d.a1 = d.a2 = d.a3 = false;
  CHECK_THROWS_AS(d.validate(), DomainError);
  CHECK_THROWS_AS(RhoSpec::affine_exp(1.0, -0.1, 1.0).validate(), DomainError);
}

TEST_CASE("coercivity constant is positive on a fixed Galerkin space") {
  DissipationSpec spec = DissipationSpec::linear_only();
  const CoercivityEstimate est = estimate_coercivity(spec, SpectralField::shell(6), 20, 5);
  CHECK(est.kappa > 0.0);
  CHECK(std::isfinite(est.kappa));
  CHECK(est.samples > 0);
  DissipationSpec full;
  const CoercivityEstimate est2 = estimate_coercivity(full, SpectralField::torus_scalar(2, 4), 5, 6);
  CHECK(est2.kappa > 0.0);
}
