#include "imlab/spectral_field.hpp"

#include <cmath>

#include "imlab/errors.hpp"
#include "imlab/spectral_ops.hpp"

namespace imlab {

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::TorusScalar: return "torus-scalar";
    case FieldKind::TorusVector: return "torus-vector";
    case FieldKind::Shell: return "shell";
  }
  return "?";
}

double ShellGeometry::wavenumber(int n) const { return k0 * std::pow(lambda, n); }

SpectralField SpectralField::torus_scalar(int dim, int cutoff) {
  SpectralField f;
  f.kind_ = FieldKind::TorusScalar;
  f.modes_ = ModeSet::torus(dim, cutoff);
  f.coeffs_ = Eigen::MatrixXcd::Zero(f.modes_->size(), 1);
  return f;
}

SpectralField SpectralField::torus_vector(int dim, int cutoff, int components) {
  if (components < 1) throw ShapeError("vector field needs at least one component");
  SpectralField f;
  f.kind_ = FieldKind::TorusVector;
  f.modes_ = ModeSet::torus(dim, cutoff);
  f.coeffs_ = Eigen::MatrixXcd::Zero(f.modes_->size(), components);
  return f;
}

SpectralField SpectralField::shell(int count, ShellGeometry geometry) {
  if (!(geometry.lambda > 1.0)) throw DomainError("shell lambda must be > 1");
  if (!(geometry.k0 > 0.0)) throw DomainError("shell k0 must be > 0");
  SpectralField f;
  f.kind_ = FieldKind::Shell;
  f.modes_ = ModeSet::shells(count);
  f.geometry_ = geometry;
  f.coeffs_ = Eigen::MatrixXcd::Zero(count, 1);
  return f;
}

Complex SpectralField::coefficient(const Mode& m, int comp) const {
  const int i = modes_->index_of(m);
  return i < 0 ? Complex{} : coeffs_(i, comp);
}

void SpectralField::set_coefficient(const Mode& m, Complex value, int comp) {
  const int i = modes_->index_of(m);
  if (i < 0) throw TruncationError("mode not retained in this Galerkin space");
  coeffs_(i, comp) = value;
}

void SpectralField::set_real_mode(const Mode& m, Complex value, int comp) {
  const int i = modes_->index_of(m);
  if (i < 0) throw TruncationError("mode not retained in this Galerkin space");
  coeffs_(i, comp) = value;
  if (is_torus()) coeffs_(modes_->negated(i), comp) = std::conj(value);
}

SpectralField SpectralField::zeros_like() const {
  SpectralField f = *this;
  f.coeffs_.setZero();
  return f;
}

bool SpectralField::same_space(const SpectralField& other) const {
  return kind_ == other.kind_ && modes_ && other.modes_ && *modes_ == *other.modes_ &&
         components() == other.components() && geometry_ == other.geometry_;
}

void SpectralField::require_same_space(const SpectralField& other, const char* op) const {
  if (!same_space(other)) {
    throw ShapeError(std::string(op) + ": operands live in different Galerkin spaces");
  }
}

double SpectralField::wavenumber(int i) const {
  if (is_shell()) return geometry_.wavenumber(modes_->mode(i)[0]);
  return std::sqrt(static_cast<double>(modes_->norm_sq(i)));
}

double SpectralField::laplacian_eigenvalue(int i) const {
  if (is_shell()) {
    const double k = geometry_.wavenumber(modes_->mode(i)[0]);
    return k * k;
  }
  return static_cast<double>(modes_->norm_sq(i));
}

double SpectralField::reality_defect() const {
  if (is_shell()) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < size(); ++i) {
    const int j = modes_->negated(i);
    for (int c = 0; c < components(); ++c) {
      worst = std::max(worst, std::abs(coeffs_(i, c) - std::conj(coeffs_(j, c))));
    }
  }
  return worst;
}

void SpectralField::enforce_reality() {
  if (is_shell()) return;
  for (int i = 0; i < size(); ++i) {
    if (!modes_->is_positive(i)) continue;
    const int j = modes_->negated(i);
    for (int c = 0; c < components(); ++c) {
      const Complex avg = 0.5 * (coeffs_(i, c) + std::conj(coeffs_(j, c)));
      coeffs_(i, c) = avg;
      coeffs_(j, c) = std::conj(avg);
    }
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_space(other, "operator+=");
  coeffs_ += other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_space(other, "operator-=");
  coeffs_ -= other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

SpectralField random_field(const SpectralField& space, std::mt19937_64& rng, double decay) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f = space.zeros_like();
  for (int i = 0; i < f.size(); ++i) {
    const double scale =
        std::exp(-decay * (f.is_shell() ? f.modes().mode(i)[0] : f.wavenumber(i)));
    for (int c = 0; c < f.components(); ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      f.at(i, c) = scale * Complex(re, im);
    }
  }
  f.enforce_reality();
  if (f.kind() == FieldKind::TorusVector) f = leray_project(f);
  return f;
}

}  // namespace imlab
