#include "imlab/spectral_ops.hpp"

#include <cmath>
#include <numbers>

#include "imlab/errors.hpp"

namespace imlab {

namespace {

double torus_volume(int dim) { return std::pow(2.0 * std::numbers::pi, dim); }

}  // namespace

SpectralField galerkin_project(const SpectralField& u, int new_cutoff) {
  if (new_cutoff > u.cutoff()) {
    throw TruncationError("cannot project onto a larger Galerkin space (N' > N)");
  }
  if (new_cutoff == u.cutoff()) return u;
  SpectralField out;
  if (u.is_shell()) {
    out = SpectralField::shell(new_cutoff, u.geometry());
  } else if (u.kind() == FieldKind::TorusScalar) {
    out = SpectralField::torus_scalar(u.dim(), new_cutoff);
  } else {
    out = SpectralField::torus_vector(u.dim(), new_cutoff, u.components());
  }
  for (int i = 0; i < out.size(); ++i) {
    const int j = u.modes().index_of(out.modes().mode(i));
    out.coeffs().row(i) = u.coeffs().row(j);
  }
  return out;
}

SpectralField galerkin_embed(const SpectralField& u, int new_cutoff) {
  if (new_cutoff < u.cutoff()) throw TruncationError("embedding target is smaller than the source");
  SpectralField out;
  if (u.is_shell()) {
    out = SpectralField::shell(new_cutoff, u.geometry());
  } else if (u.kind() == FieldKind::TorusScalar) {
    out = SpectralField::torus_scalar(u.dim(), new_cutoff);
  } else {
    out = SpectralField::torus_vector(u.dim(), new_cutoff, u.components());
  }
  for (int i = 0; i < u.size(); ++i) {
    const int j = out.modes().index_of(u.modes().mode(i));
    out.coeffs().row(j) = u.coeffs().row(i);
  }
  return out;
}

SpectralField leray_project(const SpectralField& u) {
  if (u.kind() != FieldKind::TorusVector) throw ShapeError("leray_project needs a torus-vector field");
  if (u.components() != u.dim()) throw ShapeError("leray_project needs k = d components");
  SpectralField out = u;
  for (int i = 0; i < u.size(); ++i) {
    const Mode& m = u.modes().mode(i);
    Complex dot = 0.0;
    for (int l = 0; l < u.dim(); ++l) dot += static_cast<double>(m[l]) * u.at(i, l);
    const double m2 = u.modes().norm_sq(i);
    for (int l = 0; l < u.dim(); ++l) out.at(i, l) -= static_cast<double>(m[l]) * dot / m2;
  }
  return out;
}

double inner_product(const SpectralField& u, const SpectralField& v) {
  u.require_same_space(v, "inner_product");
  const double sum = (u.coeffs().array() * v.coeffs().array().conjugate()).real().sum();
  return u.is_shell() ? sum : torus_volume(u.dim()) * sum;
}

double l2_norm_sq(const SpectralField& u) { return inner_product(u, u); }

double hs_norm_sq(const SpectralField& u, double s) {
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double weight = std::pow(u.laplacian_eigenvalue(i), s);
    sum += weight * u.coeffs().row(i).squaredNorm();
  }
  return u.is_shell() ? sum : torus_volume(u.dim()) * sum;
}

double hs_norm(const SpectralField& u, double s) { return std::sqrt(hs_norm_sq(u, s)); }

SpectralField apply_multiplier(const SpectralField& u, const std::function<Complex(int)>& f) {
  SpectralField out = u;
  for (int i = 0; i < u.size(); ++i) out.coeffs().row(i) *= f(i);
  return out;
}

Eigen::ArrayXd synthesize_derivative(const Collocation& grid, const SpectralField& u, int comp,
                                     const std::array<int, 3>& orders) {
  Eigen::VectorXcd c(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const Mode& m = u.modes().mode(i);
    Complex factor = 1.0;
    for (int a = 0; a < 3; ++a) {
      for (int r = 0; r < orders[static_cast<std::size_t>(a)]; ++r) factor *= Complex(0.0, m[a]);
    }
    c(i) = factor * u.at(i, comp);
  }
  return grid.synthesize(c);
}

Eigen::ArrayXd synthesize_laplacian_power(const Collocation& grid, const SpectralField& u,
                                          int comp, double power) {
  Eigen::VectorXcd c(u.size());
  for (int i = 0; i < u.size(); ++i) {
    c(i) = std::pow(static_cast<double>(u.modes().norm_sq(i)), power) * u.at(i, comp);
  }
  return grid.synthesize(c);
}

double lebesgue_integral(const SpectralField& u, int k, int p, int oversampling) {
  if (u.is_shell()) throw CapabilityError("W^{k,p} norms are not defined for shell states");
  if (p < 2 || p % 2 != 0) throw DomainError("W^{k,p} needs an even p >= 2");
  if (k < 0) throw DomainError("W^{k,p} needs k >= 0");
  const int r = u.modes().max_component();
  const int exact = p * r + 1;
  const int sampled = oversampling * (2 * r + 1);
  Collocation grid(u.mode_set(), fft_friendly_size(std::max({exact, sampled, 2 * r + 1})));

  // |D^k u|^2 accumulated over components (and directions for odd k).
  Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(grid.points());
  const double lap_power = (k / 2);  // (-Lap)^{k/2}; sign irrelevant under |.|
  for (int c = 0; c < u.components(); ++c) {
    if (k % 2 == 0) {
      mag2 += synthesize_laplacian_power(grid, u, c, lap_power).square();
    } else {
      SpectralField lifted = apply_multiplier(u, [&](int i) {
        return Complex(std::pow(static_cast<double>(u.modes().norm_sq(i)), lap_power), 0.0);
      });
      for (int a = 0; a < u.dim(); ++a) {
        std::array<int, 3> orders{0, 0, 0};
        orders[static_cast<std::size_t>(a)] = 1;
        mag2 += synthesize_derivative(grid, lifted, c, orders).square();
      }
    }
  }
  return grid.integral(mag2.pow(0.5 * p));
}

double norm(const SpectralField& u, const NormSpec& spec) {
  if (spec.family == NormSpec::Family::Sobolev) {
    if (spec.s < 0.0) throw DomainError("Sobolev index must be >= 0");
    return hs_norm(u, spec.s);
  }
  if (u.is_shell()) throw CapabilityError("W^{k,p} norms are not defined for shell states");
  return std::pow(lebesgue_integral(u, spec.k, spec.p, spec.oversampling), 1.0 / spec.p);
}

double divergence_defect(const SpectralField& u) {
  if (u.kind() != FieldKind::TorusVector) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const Mode& m = u.modes().mode(i);
    Complex div = 0.0;
    for (int l = 0; l < std::min(u.dim(), u.components()); ++l) div += static_cast<double>(m[l]) * u.at(i, l);
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

SpectralField quadratic_product(const SpectralField& u, const SpectralField& v, const PointwiseOp& op) {
  if (u.is_shell() || v.is_shell()) throw CapabilityError("quadratic_product needs torus fields");
  if (u.dim() != v.dim() || u.components() != v.components()) {
    throw ShapeError("quadratic_product operands differ in dimension or components");
  }
  // Both operands are band-limited by the larger radius; pad for a quadratic.
  auto modes = u.cutoff() >= v.cutoff() ? u.mode_set() : v.mode_set();
  Collocation grid = Collocation::for_products(modes, 2);
  Collocation grid_u(u.mode_set(), grid.grid_size());
  Collocation grid_v(v.mode_set(), grid.grid_size());
  SpectralField out = u.zeros_like();
  for (int c = 0; c < u.components(); ++c) {
    const Eigen::ArrayXd a = grid_u.synthesize(u.coeffs().col(c));
    const Eigen::ArrayXd b = grid_v.synthesize(v.coeffs().col(c));
    Eigen::ArrayXd w(a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) w(j) = op(a(j), b(j));
    out.coeffs().col(c) = grid_u.analyze(w);
  }
  return out;
}

double sup_norm(const SpectralField& u, int oversampling) {
  if (u.is_shell()) throw CapabilityError("sup_norm needs a torus field");
  const int r = u.modes().max_component();
  Collocation grid(u.mode_set(), fft_friendly_size(oversampling * (2 * r + 1)));
  double worst = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    worst = std::max(worst, grid.synthesize(u.coeffs().col(c)).abs().maxCoeff());
  }
  return worst;
}

}  // namespace imlab
