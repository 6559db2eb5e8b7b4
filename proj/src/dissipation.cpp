#include "imlab/dissipation.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "imlab/collocation.hpp"
#include "imlab/errors.hpp"
#include "imlab/spectral_ops.hpp"

namespace imlab {

double RhoSpec::operator()(double x) const {
  if (kind == Kind::Linear) return slope * x;
  return slope * x + beta * std::expm1(kappa * x);
}

double RhoSpec::inverse(double y) const {
  if (y < 0.0) throw DomainError("rho inverse needs a nonnegative argument");
  if (kind == Kind::Linear) return y / slope;
  // rho is increasing and rho(x) >= slope x, so the root lies in [0, y / slope].
  double lo = 0.0, hi = y / slope;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void RhoSpec::validate() const {
  if (!(slope > 0.0)) throw DomainError("rho slope must be > 0");
  if (kind == Kind::AffineExp && (beta < 0.0 || !(kappa > 0.0))) {
    throw DomainError("affine-exp rho needs beta >= 0 and kappa > 0 to stay convex and increasing");
  }
}

void DissipationSpec::validate() const {
  if (s_star < 4.0) throw DomainError("dissipation needs s_star >= 4");
  if (!(s1_star > s_star)) throw DomainError("dissipation needs s1_star > s_star");
  if (q < 2 || q % 2 != 0) throw DomainError("dissipation exponent q must be an even integer >= 2");
  if (!a1 && !a2 && !a3) throw DomainError("dissipation flags a1, a2, a3 must not all be zero");
  rho.validate();
}

namespace {

void require_supported(const DissipationSpec& spec, const SpectralField& u) {
  if (u.is_shell() && spec.has_nonlinear()) {
    throw CapabilityError("a2/a3 dissipation terms are not defined on shell states");
  }
}

}  // namespace

double dissipation_prefactor(const DissipationSpec& spec, const SpectralField& u) {
  return std::exp(spec.rho(hs_norm(u, spec.s_star)));
}

double linear_rate(const DissipationSpec& spec, const SpectralField& u, int mode) {
  return std::pow(u.laplacian_eigenvalue(mode), spec.s1_star);
}

SpectralField nonlinear_part(const DissipationSpec& spec, const SpectralField& u) {
  require_supported(spec, u);
  SpectralField out = u.zeros_like();
  if (!spec.has_nonlinear() || u.is_shell()) return out;
  const int q = spec.q;
  const int k = u.components();

  if (spec.a2) {
    const Collocation grid = Collocation::for_products(u.mode_set(), q - 1);
    std::vector<Eigen::ArrayXd> lap;
    Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(grid.points());
    for (int c = 0; c < k; ++c) {
      lap.push_back(synthesize_laplacian_power(grid, u, c, 1.0));
      mag2 += lap.back().square();
    }
    const Eigen::ArrayXd g = mag2.pow(0.5 * (q - 2));
    for (int c = 0; c < k; ++c) {
      // Lap(g Lap u) with Lap u = -L: multiplier -|m|^2 on -(g L).
      const Eigen::VectorXcd hat = grid.analyze(g * lap[static_cast<std::size_t>(c)]);
      for (int i = 0; i < u.size(); ++i) out.at(i, c) += u.laplacian_eigenvalue(i) * hat(i);
    }
  }
  if (spec.a3) {
    const Collocation grid = Collocation::for_products(u.mode_set(), 2 * q - 1);
    const int d = u.dim();
    std::vector<Eigen::ArrayXd> grad;  // (c, l) flattened
    Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(grid.points());
    for (int c = 0; c < k; ++c) {
      for (int l = 0; l < d; ++l) {
        std::array<int, 3> orders{0, 0, 0};
        orders[static_cast<std::size_t>(l)] = 1;
        grad.push_back(synthesize_derivative(grid, u, c, orders));
        mag2 += grad.back().square();
      }
    }
    const Eigen::ArrayXd h = mag2.pow(q - 1);
    for (int c = 0; c < k; ++c) {
      for (int l = 0; l < d; ++l) {
        const Eigen::VectorXcd hat = grid.analyze(h * grad[static_cast<std::size_t>(c * d + l)]);
        for (int i = 0; i < u.size(); ++i) {
          out.at(i, c) -= Complex(0.0, u.modes().mode(i)[static_cast<std::size_t>(l)]) * hat(i);
        }
      }
    }
  }
  if (out.kind() == FieldKind::TorusVector) out = leray_project(out);
  out.enforce_reality();
  return out;
}

double nonlinear_potential(const DissipationSpec& spec, const SpectralField& u) {
  require_supported(spec, u);
  if (u.is_shell()) return 0.0;
  double sum = 0.0;
  if (spec.a2) sum += lebesgue_integral(u, 2, spec.q);
  if (spec.a3) sum += lebesgue_integral(u, 1, 2 * spec.q);
  return sum;
}

SpectralField apply_A(const DissipationSpec& spec, const SpectralField& u) {
  require_supported(spec, u);
  SpectralField out = spec.has_nonlinear() ? nonlinear_part(spec, u) : u.zeros_like();
  if (spec.a1) {
    for (int i = 0; i < u.size(); ++i) out.coeffs().row(i) += linear_rate(spec, u, i) * u.coeffs().row(i);
  }
  return out * dissipation_prefactor(spec, u);
}

double G_potential(const DissipationSpec& spec, const SpectralField& u) {
  require_supported(spec, u);
  double sum = spec.has_nonlinear() ? nonlinear_potential(spec, u) : 0.0;
  if (spec.a1) sum += hs_norm_sq(u, spec.s1_star);
  return dissipation_prefactor(spec, u) * sum;
}

double xi(const DissipationSpec& spec, double x) {
  if (x < 0.0) throw DomainError("xi needs x >= 0");
  return spec.rho.inverse(3.0 * x);
}

double xi_inverse(const DissipationSpec& spec, double y) {
  if (y < 0.0) throw DomainError("xi inverse needs y >= 0");
  return spec.rho(y) / 3.0;
}

CoercivityEstimate estimate_coercivity(const DissipationSpec& spec, const SpectralField& space, int directions,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CoercivityEstimate best;
  best.kappa = std::numeric_limits<double>::infinity();
  for (int t = 0; t < directions; ++t) {
    SpectralField dir = random_field(space, rng, 0.1);
    dir *= 1.0 / hs_norm(dir, spec.s_star);
    for (int e = -12; e <= 12; ++e) {
      const double scale = std::pow(2.0, 0.5 * e);
      const double g = G_potential(spec, dir * scale);
      if (!std::isfinite(g)) continue;
      const double ratio = g / std::pow(scale, 4);
      ++best.samples;
      if (ratio < best.kappa) {
        best.kappa = ratio;
        best.at_scale = scale;
      }
    }
  }
  return best;
}

}  // namespace imlab
