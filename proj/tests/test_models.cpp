#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "imlab/errors.hpp"
#include "imlab/model.hpp"
#include "imlab/spectral_ops.hpp"

using namespace imlab;

namespace {

const double kPi = std::numbers::pi;

// Transport oracle for active scalars: sum over retained m, n with m + n = k of
// (i K_m . n) u_m v_n, with K_m the velocity multiplier.
SpectralField transport_oracle(const ModelSpec& spec, const SpectralField& u, const SpectralField& v) {
  const SpectralField vel = velocity_from_scalar(spec, u);
  SpectralField out = u.zeros_like();
  for (int i = 0; i < u.size(); ++i) {
    for (int j = 0; j < v.size(); ++j) {
      const Mode& m = u.modes().mode(i);
      const Mode& n = v.modes().mode(j);
      const int k = out.modes().index_of({m[0] + n[0], m[1] + n[1], 0});
      if (k < 0) continue;
      const Complex dot = vel.at(i, 0) * Complex(0.0, n[0]) + vel.at(i, 1) * Complex(0.0, n[1]);
      out.at(k) += dot * v.at(j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("Biot-Savart and gSQG velocities") {
  SpectralField w = SpectralField::torus_scalar(2, 4);
  w.set_real_mode({1, 0, 0}, 0.5);
  const SpectralField vel = velocity_from_scalar(ModelSpec::euler2d(4), w);
  const int i = vel.modes().index_of({1, 0, 0});
  // (0, sin x1): coefficient -i/2 at m = (1, 0).
  CHECK(std::abs(vel.at(i, 0)) == 0.0);
  CHECK(vel.at(i, 1).imag() == doctest::Approx(-0.5));
  CHECK(bilinear(ModelSpec::euler2d(4), w, w).coeffs().norm() < 1e-15);

  // gSQG with alpha = 1/2: stream function |m|^{-1} u_m, then grad^perp adds |m|.
  SpectralField s = SpectralField::torus_scalar(2, 8);
  s.set_real_mode({2, 2, 0}, Complex(0.3, 0.4));
  const SpectralField k = velocity_from_scalar(ModelSpec::gsqg(0.5, 8), s);
  const int j = k.modes().index_of({2, 2, 0});
  CHECK(k.coeffs().row(j).norm() == doctest::Approx(std::sqrt(8.0) * (1.0 / std::sqrt(8.0)) * 0.5).epsilon(1e-14));
  CHECK(divergence_defect(k) == 0.0);
}

TEST_CASE("transport matches the convolution oracle") {
  std::mt19937_64 rng(41);
  for (const ModelSpec& spec : {ModelSpec::euler2d(8), ModelSpec::gsqg(0.25, 8), ModelSpec::gsqg(0.5, 5)}) {
    const SpectralField u = random_field(spec.state_space(), rng);
    const SpectralField v = random_field(spec.state_space(), rng);
    const SpectralField fast = bilinear(spec, u, v);
    const SpectralField slow = transport_oracle(spec, u, v);
    CHECK((fast.coeffs() - slow.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Sabra support and conserved quantities") {
  const ModelSpec spec = ModelSpec::sabra(8);
  SpectralField u = spec.state_space();
  u.at(0) = Complex(0.4, -0.1);
  u.at(1) = Complex(0.2, 0.3);
  const SpectralField b = bilinear(spec, u, u);
  for (int n = 0; n < b.size(); ++n) {
    if (n == 2) {
      CHECK(std::abs(b.at(n)) > 0.0);
    } else {
      CHECK(std::abs(b.at(n)) == 0.0);
    }
  }
  // Only shell 3 in the quadruple sum: -i k0 (a lam^2 u_2 u_1 + b lam^2 u_2 u_1).
  const Complex expected = Complex(0.0, -1.0) * (4.0 * u.at(1) * u.at(0) + 4.0 * u.at(1) * u.at(0));
  CHECK(std::abs(b.at(2) - expected) < 1e-15);

  SpectralField single = spec.state_space();
  single.at(2) = Complex(0.6, 0.8);
  CHECK(secondary_hamiltonian(spec, single) == doctest::Approx(0.5 * std::pow(-0.5, 3)).epsilon(1e-15));
  CHECK(secondary_hamiltonian(spec, spec.state_space()) == 0.0);
  CHECK(energy(spec.state_space()) == 0.0);
}

TEST_CASE("secondary Hamiltonian and Casimirs") {
  CHECK_THROWS_AS(secondary_hamiltonian(ModelSpec::euler3d(4), ModelSpec::euler3d(4).state_space()), CapabilityError);
  CHECK_THROWS_AS(casimir(SpectralField::shell(4), CasimirFunction::poly({0, 1})), CapabilityError);

  std::mt19937_64 rng(43);
  const SpectralField w = random_field(ModelSpec::euler2d(10).state_space(), rng);
  CHECK(std::abs(casimir(w, CasimirFunction::poly({0, 1}))) < 1e-12);
  // f(z) = z^2 is twice the enstrophy: int w^2 = |w|^2.
  CHECK(casimir(w, CasimirFunction::poly({0, 0, 1})) == doctest::Approx(l2_norm_sq(w)).epsilon(1e-12));
  // Exact polynomial quadrature vs a finely sampled callable.
  const double poly = casimir(w, CasimirFunction::poly({0.0, 0.0, 0.5, 0.0, -0.25}));
  const double sampled = casimir(w, CasimirFunction::of([](double z) { return 0.5 * z * z - 0.25 * z * z * z * z; }, 4));
  CHECK(poly == doctest::Approx(sampled).epsilon(1e-11));

  // gSQG H is 1/2 int ((-Lap)^{(alpha-1)/2} u)^2.
  SpectralField s = SpectralField::torus_scalar(2, 8);
  s.set_real_mode({1, 2, 0}, 1.0);
  const double h = secondary_hamiltonian(ModelSpec::gsqg(0.25, 8), s);
  CHECK(h == doctest::Approx(0.5 * 4.0 * kPi * kPi * 2.0 * std::pow(5.0, -0.75)).epsilon(1e-14));
}

TEST_CASE("structure verification on every variant") {
  std::vector<ModelSpec> specs{ModelSpec::euler2d(16), ModelSpec::euler3d(8), ModelSpec::gsqg(0.25, 16),
                               ModelSpec::sabra(12), ModelSpec::goy(12)};
  ModelSpec rot = ModelSpec::euler3d(6);
  rot.coriolis = {0.0, 0.0, 1.5};
  specs.push_back(rot);
  for (const auto& spec : specs) {
    const StructureReport report = verify_structure(spec, 20, 7);
    INFO(spec.canonical());
    for (const auto& c : report.checks) {
      INFO(c.name << " " << c.max_violation);
      CHECK(c.pass);
    }
  }
  const StructureReport degenerate = verify_structure(ModelSpec::sabra(8, 0.0, 0.0), 5, 1);
  CHECK(degenerate.pass());
}

TEST_CASE("Coriolis term is skew") {
  ModelSpec spec = ModelSpec::euler3d(6);
  spec.coriolis = {0.3, -0.2, 1.0};
  std::mt19937_64 rng(47);
  const SpectralField u = random_field(spec.state_space(), rng);
  const SpectralField v = random_field(spec.state_space(), rng);
  const SpectralField cu = coriolis_term(spec, u);
  CHECK(std::abs(inner_product(cu, u)) < 1e-12 * l2_norm_sq(u));
  CHECK(std::abs(inner_product(cu, v) + inner_product(coriolis_term(spec, v), u)) < 1e-12 * l2_norm_sq(u));
  CHECK(divergence_defect(cu) < 1e-13);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(ModelSpec::gsqg(0.75, 8).validate(), DomainError);
  ModelSpec singular = ModelSpec::gsqg(0.75, 8);
  singular.allow_singular = true;
  CHECK_NOTHROW(singular.validate());
  CHECK_THROWS_AS(ModelSpec::sabra(8, 1, 1, 1.0).validate(), DomainError);
  CHECK_THROWS_AS(bilinear(ModelSpec::sabra(8), SpectralField::torus_scalar(2, 4), SpectralField::torus_scalar(2, 4)),
                  ShapeError);
  CHECK(parse_variant("goy") == ModelVariant::GOY);
  CHECK_THROWS_AS(parse_variant("tao"), ConfigError);
}
