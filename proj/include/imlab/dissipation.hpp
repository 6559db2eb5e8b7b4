#pragma once

#include <cstdint>
#include <string>

#include "imlab/spectral_field.hpp"

namespace imlab {

/// Strictly increasing convex rho with rho(x) >= slope * x.
///
///   Linear:    rho(x) = slope * x
///   AffineExp: rho(x) = slope * x + beta * (exp(kappa * x) - 1)
struct RhoSpec {
  enum class Kind { Linear, AffineExp };

  Kind kind = Kind::Linear;
  double slope = 1.0;
  double beta = 0.0;
  double kappa = 1.0;

  static RhoSpec linear(double slope) { return {Kind::Linear, slope, 0.0, 1.0}; }
  static RhoSpec affine_exp(double slope, double beta, double kappa) {
    return {Kind::AffineExp, slope, beta, kappa};
  }

  double operator()(double x) const;
  /// rho^{-1}(y) for y >= 0.
  double inverse(double y) const;
  void validate() const;
  bool operator==(const RhoSpec&) const = default;
};

/// Parameters of the dissipation operator
///
///   A(u) = exp(rho(|u|_{H^s*})) ( a1 (-Lap)^{s1*} u + a2 Lap(|Lap u|^{q-2} Lap u)
///                                - a3 div(|grad u|^{2q-2} grad u) )
///
/// and of its potential G(u) = <A(u), u>.
struct DissipationSpec {
  double s_star = 4.0;
  double s1_star = 5.0;
  int q = 6;
  bool a1 = true;
  bool a2 = true;
  bool a3 = true;
  RhoSpec rho;

  /// a1 only, the only form available on shell states.
  static DissipationSpec linear_only() {
    DissipationSpec d;
    d.a2 = d.a3 = false;
    return d;
  }

  bool has_nonlinear() const { return a2 || a3; }
  void validate() const;
  bool operator==(const DissipationSpec&) const = default;
};

/// exp(rho(|u|_{H^s*})).
double dissipation_prefactor(const DissipationSpec& spec, const SpectralField& u);

/// Pi_N A(u).
SpectralField apply_A(const DissipationSpec& spec, const SpectralField& u);
/// G(u), evaluated from the norms directly, not through apply_A.
double G_potential(const DissipationSpec& spec, const SpectralField& u);

/// The a1 multiplier |m|^{2 s1*} (k_n^{2 s1*} on shells) at mode i, without the
/// prefactor.
double linear_rate(const DissipationSpec& spec, const SpectralField& u, int mode);
/// a2/a3 part of A without the prefactor (zero field if both flags are off).
SpectralField nonlinear_part(const DissipationSpec& spec, const SpectralField& u);
/// a2/a3 part of G without the prefactor.
double nonlinear_potential(const DissipationSpec& spec, const SpectralField& u);

/// xi(x) = rho^{-1}(3x).
double xi(const DissipationSpec& spec, double x);
/// xi^{-1}(y) = rho(y) / 3.
double xi_inverse(const DissipationSpec& spec, double y);

struct CoercivityEstimate {
  double kappa = 0.0;      // min of G(u) / |u|^4_{H^s*} seen
  double at_scale = 0.0;   // |u|_{H^s*} of the minimizer
  int samples = 0;
};

/// Randomized search for kappa_N in G(u) >= kappa_N |u|^4_{H^s*} on the
/// Galerkin space of `space`: random directions times a log sweep of scales.
CoercivityEstimate estimate_coercivity(const DissipationSpec& spec, const SpectralField& space, int directions,
                                       std::uint64_t seed);

}  // namespace imlab
