#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "imlab/collocation.hpp"
#include "imlab/errors.hpp"
#include "imlab/snapshot_io.hpp"
#include "imlab/spectral_ops.hpp"

using namespace imlab;

namespace {

const double kPi = std::numbers::pi;

SpectralField cos_x1(int cutoff) {
  SpectralField u = SpectralField::torus_scalar(2, cutoff);
  u.set_real_mode({1, 0, 0}, 0.5);
  return u;
}

// Brute-force Fourier convolution: (uv)_k = sum_{m+n=k} u_m v_n over retained
// m, n, kept when k is retained.
SpectralField convolution_oracle(const SpectralField& u, const SpectralField& v) {
  SpectralField out = u.zeros_like();
  for (int i = 0; i < u.size(); ++i) {
    for (int j = 0; j < v.size(); ++j) {
      const Mode& m = u.modes().mode(i);
      const Mode& n = v.modes().mode(j);
      const Mode k{m[0] + n[0], m[1] + n[1], m[2] + n[2]};
      const int idx = out.modes().index_of(k);
      if (idx >= 0) out.at(idx) += u.at(i) * v.at(j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("mode sets are closed under negation and exclude zero") {
  auto modes = ModeSet::torus(2, 5);
  for (int i = 0; i < modes->size(); ++i) {
    const Mode& m = modes->mode(i);
    CHECK(modes->norm_sq(i) > 0);
    CHECK(modes->norm_sq(i) <= 5);
    const Mode& neg = modes->mode(modes->negated(i));
    CHECK(neg[0] == -m[0]);
    CHECK(neg[1] == -m[1]);
  }
  // |m|^2 <= 5 in Z^2 minus the origin: 21 - 1 lattice points.
  CHECK(modes->size() == 20);
  CHECK(mode_radius(5) == 2);
  CHECK(cutoff_for_radius(3, 2) == 12);
}

TEST_CASE("galerkin_project drops modes above the cutoff") {
  SpectralField u = SpectralField::torus_scalar(2, 9);
  u.set_real_mode({1, 0, 0}, Complex(0.3, 0.1));
  u.set_real_mode({0, 3, 0}, Complex(-0.2, 0.4));
  const SpectralField p = galerkin_project(u, 4);
  CHECK(p.cutoff() == 4);
  // Parseval over the surviving pair: 2 (2pi)^2 |0.3+0.1i|^2.
  CHECK(l2_norm_sq(p) == doctest::Approx(2.0 * 4.0 * kPi * kPi * 0.1).epsilon(1e-14));
  CHECK_THROWS_AS(galerkin_project(p, 9), TruncationError);
  CHECK(galerkin_project(u, 9).coeffs() == u.coeffs());

  SpectralField single = SpectralField::torus_scalar(2, 4);
  single.set_real_mode({0, 2, 0}, 1.0);
  CHECK(galerkin_project(single, 4).coeffs() == single.coeffs());
}

TEST_CASE("galerkin projection is orthogonal") {
  std::mt19937_64 rng(3);
  const SpectralField u = random_field(SpectralField::torus_scalar(2, 16), rng);
  const SpectralField low = galerkin_embed(galerkin_project(u, 6), 16);
  const SpectralField high = u - low;
  CHECK(inner_product(low, high) == 0.0);
}

TEST_CASE("leray projection") {
  SpectralField u = SpectralField::torus_vector(2, 2, 2);
  u.set_real_mode({1, 0, 0}, 1.0, 0);
  u.set_real_mode({1, 0, 0}, 1.0, 1);
  const SpectralField p = leray_project(u);
  const int i = p.modes().index_of({1, 0, 0});
  CHECK(std::abs(p.at(i, 0)) == 0.0);
  CHECK(p.at(i, 1) == Complex(1.0, 0.0));
  CHECK(divergence_defect(p) == 0.0);

  // A pure gradient is annihilated.
  SpectralField g = SpectralField::torus_vector(3, 6, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < g.size(); ++k) {
    if (!g.modes().is_positive(k)) continue;
    const Complex phi(gauss(rng), gauss(rng));
    const Mode& m = g.modes().mode(k);
    for (int l = 0; l < 3; ++l) g.set_real_mode(m, Complex(0.0, m[static_cast<std::size_t>(l)]) * phi, l);
  }
  CHECK(l2_norm_sq(leray_project(g)) < 1e-24 * l2_norm_sq(g));

  // Idempotent and self-adjoint.
  SpectralField a = SpectralField::torus_vector(3, 6, 3);
  SpectralField b = a;
  for (int k = 0; k < a.size(); ++k) {
    if (!a.modes().is_positive(k)) continue;
    for (int l = 0; l < 3; ++l) {
      a.set_real_mode(a.modes().mode(k), Complex(gauss(rng), gauss(rng)), l);
      b.set_real_mode(b.modes().mode(k), Complex(gauss(rng), gauss(rng)), l);
    }
  }
  const SpectralField pa = leray_project(a);
  CHECK((leray_project(pa).coeffs() - pa.coeffs()).norm() <= 1e-14 * pa.coeffs().norm());
  const double sym = std::abs(inner_product(pa, b) - inner_product(a, leray_project(b)));
  CHECK(sym <= 1e-12 * std::sqrt(l2_norm_sq(a) * l2_norm_sq(b)));
  CHECK_THROWS_AS(leray_project(SpectralField::torus_scalar(2, 4)), ShapeError);
}

TEST_CASE("inner product and norms") {
  const SpectralField u = cos_x1(4);
  CHECK(inner_product(u, u) == doctest::Approx(4.0 * kPi * kPi * 0.5).epsilon(1e-15));

  SpectralField v = SpectralField::torus_scalar(2, 4);
  v.set_real_mode({1, 1, 0}, Complex(0.2, -0.7));
  CHECK(inner_product(u, v) == 0.0);
  CHECK_THROWS_AS(inner_product(u, SpectralField::torus_scalar(2, 5)), ShapeError);

  // Single mode: |u|_{H^s} = |m|^s |u|_{L2}.
  CHECK(hs_norm(v, 3.0) == doctest::Approx(std::pow(2.0, 1.5) * std::sqrt(l2_norm_sq(v))).epsilon(1e-14));

  // L^4 of cos x1: (2pi)^2 * 3/8.
  CHECK(lebesgue_integral(u, 0, 4) == doctest::Approx(4.0 * kPi * kPi * 3.0 / 8.0).epsilon(1e-13));
  CHECK(norm(u, NormSpec::lebesgue(0, 4)) ==
        doctest::Approx(std::pow(4.0 * kPi * kPi * 3.0 / 8.0, 0.25)).epsilon(1e-13));
  CHECK_THROWS_AS(norm(SpectralField::shell(5), NormSpec::lebesgue(0, 4)), CapabilityError);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const SpectralField r = random_field(SpectralField::torus_vector(3, 5, 3), rng);
    CHECK(norm(r, NormSpec::sobolev(0.0)) == doctest::Approx(std::sqrt(l2_norm_sq(r))).epsilon(1e-12));
    CHECK(hs_norm(r, 1.0) >= hs_norm(r, 0.5));
    CHECK(hs_norm(r, 2.0) >= hs_norm(r, 1.0));
  }
}

TEST_CASE("Parseval against grid quadrature") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const SpectralField u = random_field(SpectralField::torus_scalar(2, 10), rng);
    const SpectralField v = random_field(SpectralField::torus_scalar(2, 10), rng);
    const Collocation grid = Collocation::for_quadrature(u.mode_set(), 2);
    const double quad = grid.integral(grid.synthesize(u.coeffs().col(0)) * grid.synthesize(v.coeffs().col(0)));
    const double exact = inner_product(u, v);
    CHECK(std::abs(quad - exact) <= 1e-10 * std::sqrt(l2_norm_sq(u) * l2_norm_sq(v)));
  }
}

TEST_CASE("quadratic products") {
  const SpectralField u = cos_x1(4);
  const SpectralField sq = quadratic_product(u, u);
  CHECK(sq.coefficient({2, 0, 0}).real() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(sq.coefficient({1, 0, 0})) < 1e-15);

  const SpectralField same = quadratic_product(u, u, [](double a, double) { return a; });
  CHECK((same.coeffs() - u.coeffs()).norm() < 1e-15);

  std::mt19937_64 rng(23);
  for (int n : {2, 5, 8}) {
    const SpectralField a = random_field(SpectralField::torus_scalar(2, n), rng);
    const SpectralField b = random_field(SpectralField::torus_scalar(2, n), rng);
    const SpectralField fast = quadratic_product(a, b);
    const SpectralField slow = convolution_oracle(a, b);
    CHECK((fast.coeffs() - slow.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  for (int n : {3, 8}) {
    const SpectralField a = random_field(SpectralField::torus_scalar(3, n), rng);
    const SpectralField b = random_field(SpectralField::torus_scalar(3, n), rng);
    CHECK((quadratic_product(a, b).coeffs() - convolution_oracle(a, b).coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("grid budget is enforced") {
  CHECK_THROWS_AS(Collocation(ModeSet::torus(3, 4), 300), ResourceError);
  CHECK(fft_friendly_size(7) == 8);
  CHECK(fft_friendly_size(13) == 15);
  CHECK(fft_friendly_size(31) == 32);
}

TEST_CASE("snapshot round trip") {
  std::mt19937_64 rng(29);
  for (const SpectralField& space :
       {SpectralField::torus_scalar(2, 8), SpectralField::torus_vector(3, 4, 3), SpectralField::shell(9, {0.5, 1.7})}) {
    const SpectralField u = random_field(space, rng);
    std::stringstream buf;
    write_snapshot(buf, u);
    const SpectralField back = read_snapshot(buf);
    CHECK(back.kind() == u.kind());
    CHECK(back.same_space(u));
    CHECK(back.geometry() == u.geometry());
    CHECK(back.coeffs() == u.coeffs());
  }
  std::stringstream bad("IMLBX");
  CHECK_THROWS_AS(read_snapshot(bad), IoError);

  SpectralField v = SpectralField::torus_scalar(2, 1);
  v.set_real_mode({0, 1, 0}, Complex(0.25, -0.5));
  std::ostringstream csv;
  write_csv(csv, v);
  CHECK(csv.str().rfind("mode,component,re,im\n", 0) == 0);
  CHECK(csv.str().find("0:1,0,0.25,-0.5") != std::string::npos);
  CHECK(csv.str().find("0:-1,0,0.25,0.5") != std::string::npos);
}

TEST_CASE("random fields satisfy the state invariants") {
  std::mt19937_64 rng(31);
  const SpectralField u = random_field(SpectralField::torus_vector(3, 6, 3), rng);
  CHECK(u.reality_defect() == 0.0);
  CHECK(divergence_defect(u) < 1e-14);
  CHECK(u.all_finite());
}
