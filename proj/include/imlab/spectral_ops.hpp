#pragma once

#include <functional>

#include "imlab/collocation.hpp"
#include "imlab/spectral_field.hpp"

namespace imlab {

/// Which norm `norm` evaluates.
///
/// Sobolev H^s uses the Fourier multiplier |m|^s (shells: k_n^s). Lebesgue
/// W^{k,p} is the homogeneous seminorm (int |D^k u|^p dx)^{1/p} with
/// D^k = Lap^{k/2} for even k and grad Lap^{(k-1)/2} for odd k; pointwise
/// magnitudes are Euclidean over components and derivative directions.
struct NormSpec {
  enum class Family { Sobolev, Lebesgue };

  Family family = Family::Sobolev;
  double s = 0.0;
  int k = 0;
  int p = 2;
  /// Minimum points per retained wavelength for W^{k,p} quadrature; the grid
  /// is never coarser than the one that makes even-p quadrature exact.
  int oversampling = 1;

  static NormSpec sobolev(double s) { return {Family::Sobolev, s, 0, 2, 1}; }
  static NormSpec lebesgue(int k, int p) { return {Family::Lebesgue, 0.0, k, p, 1}; }
};

/// Pi_{N'}: keeps the modes with |m|^2 <= N' (or shells n <= N').
SpectralField galerkin_project(const SpectralField& u, int new_cutoff);
/// Zero-pads u into the larger space with cutoff `new_cutoff` >= u.cutoff().
SpectralField galerkin_embed(const SpectralField& u, int new_cutoff);
/// Helmholtz-Leray projector u_m <- u_m - m (m.u_m) / |m|^2.
SpectralField leray_project(const SpectralField& u);

/// <u, v> = (2pi)^d sum_m Re(u_m . conj v_m) on the torus, Re sum_n u_n conj v_n
/// for shells.
double inner_product(const SpectralField& u, const SpectralField& v);
double l2_norm_sq(const SpectralField& u);

double norm(const SpectralField& u, const NormSpec& spec);
double hs_norm(const SpectralField& u, double s);
double hs_norm_sq(const SpectralField& u, double s);
/// int |D^k u|^p dx, the p-th power of the W^{k,p} seminorm.
double lebesgue_integral(const SpectralField& u, int k, int p, int oversampling = 1);

/// max over retained m of |sum_l m_l u_m^l| (0 for non-vector fields).
double divergence_defect(const SpectralField& u);

/// Multiplies every coefficient by f(i) where i is the mode index.
SpectralField apply_multiplier(const SpectralField& u, const std::function<Complex(int)>& f);

/// Collocation values of one component of u after the Fourier multiplier
/// prod_a (i m_a)^{orders[a]}.
Eigen::ArrayXd synthesize_derivative(const Collocation& grid, const SpectralField& u, int comp,
                                     const std::array<int, 3>& orders);

/// Collocation values of one component of (-Lap)^{power} u.
Eigen::ArrayXd synthesize_laplacian_power(const Collocation& grid, const SpectralField& u,
                                          int comp, double power);

using PointwiseOp = std::function<double(double, double)>;

/// De-aliased pointwise combination op(u(x), v(x)) of two torus fields,
/// componentwise, analyzed back onto u's modes. With the default op this is
/// the exact product truncated to N with the mean dropped.
SpectralField quadratic_product(const SpectralField& u, const SpectralField& v,
                                const PointwiseOp& op = std::multiplies<double>());

/// Sup of |u| over a collocation grid with `oversampling` points per retained
/// wavelength; a band-limited estimate of the L^infty norm.
double sup_norm(const SpectralField& u, int oversampling = 8);

}  // namespace imlab
