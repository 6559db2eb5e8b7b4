#pragma once

#include <complex>
#include <memory>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "imlab/mode_set.hpp"

namespace imlab {

using Complex = std::complex<double>;

enum class FieldKind { TorusScalar, TorusVector, Shell };

std::string to_string(FieldKind kind);

/// Shell wavenumbers k_n = k0 * lambda^n.
struct ShellGeometry {
  double k0 = 1.0;
  double lambda = 2.0;

  double wavenumber(int n) const;
  bool operator==(const ShellGeometry&) const = default;
};

/// Truncated coefficient array of a state.
///
/// Coefficients are stored densely as a (modes x components) complex matrix in
/// the mode order of the attached ModeSet. Torus fields represent real
/// functions: the coefficient at -m is the conjugate of the one at m. The zero
/// mode is never stored. Copies are independent values; the mode set itself is
/// shared and immutable.
class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField torus_scalar(int dim, int cutoff);
  static SpectralField torus_vector(int dim, int cutoff, int components);
  static SpectralField shell(int count, ShellGeometry geometry = {});

  FieldKind kind() const { return kind_; }
  bool is_shell() const { return kind_ == FieldKind::Shell; }
  bool is_torus() const { return kind_ != FieldKind::Shell; }
  int dim() const { return modes_->dim(); }
  int components() const { return static_cast<int>(coeffs_.cols()); }
  /// Eigenvalue cutoff N (torus) or shell count.
  int cutoff() const { return modes_->cutoff(); }
  int size() const { return modes_->size(); }
  const ModeSet& modes() const { return *modes_; }
  const std::shared_ptr<const ModeSet>& mode_set() const { return modes_; }
  const ShellGeometry& geometry() const { return geometry_; }

  Eigen::MatrixXcd& coeffs() { return coeffs_; }
  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  Complex& at(int mode, int comp = 0) { return coeffs_(mode, comp); }
  Complex at(int mode, int comp = 0) const { return coeffs_(mode, comp); }

  /// Coefficient at an explicit wave vector (0 when not retained).
  Complex coefficient(const Mode& m, int comp = 0) const;
  void set_coefficient(const Mode& m, Complex value, int comp = 0);
  /// Sets m and (torus) -m consistently with the reality condition.
  void set_real_mode(const Mode& m, Complex value, int comp = 0);

  /// Same space, all coefficients zero.
  SpectralField zeros_like() const;
  bool same_space(const SpectralField& other) const;
  void require_same_space(const SpectralField& other, const char* op) const;

  /// |m| (torus) or k_n (shell) for mode index i.
  double wavenumber(int i) const;
  /// |m|^2 (torus) or k_n^2 (shell): the eigenvalue of -Laplacian.
  double laplacian_eigenvalue(int i) const;

  bool all_finite() const { return coeffs_.allFinite(); }
  /// Largest deviation from the reality condition (0 for shells).
  double reality_defect() const;
  /// Projects onto the reality-symmetric subspace (no-op for shells).
  void enforce_reality();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

 private:
  FieldKind kind_ = FieldKind::TorusScalar;
  std::shared_ptr<const ModeSet> modes_;
  ShellGeometry geometry_;
  Eigen::MatrixXcd coeffs_;
};

/// Random element of the Galerkin space of `space`: independent Gaussian
/// coefficients with standard deviation exp(-decay * |m|) (torus) or
/// exp(-decay * n) (shell), made real / divergence free as required.
SpectralField random_field(const SpectralField& space, std::mt19937_64& rng,
                           double decay = 0.3);

}  // namespace imlab
