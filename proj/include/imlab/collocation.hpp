#pragma once

#include <memory>

#include <Eigen/Dense>

#include "imlab/mode_set.hpp"

namespace imlab {

/// Uniform collocation grid on the torus [0, 2pi)^d with M points per axis,
/// paired with the retained mode set it transforms to and from.
///
/// synthesize: u(x_j) = sum_m c_m exp(i m.x_j), real part taken.
/// analyze:    c_m = M^{-d} sum_j u(x_j) exp(-i m.x_j), for the retained m.
class Collocation {
 public:
  /// Grid points above this count raise ResourceError.
  static constexpr long kMaxPoints = 1L << 24;

  Collocation(std::shared_ptr<const ModeSet> modes, int grid_size);

  /// Grid on which a product of `degree` band-limited fields analyzes back onto
  /// the retained modes without aliasing: M >= (degree + 1) R + 1.
  static Collocation for_products(std::shared_ptr<const ModeSet> modes, int degree);
  /// Grid on which the mean of a degree-`degree` product is exact:
  /// M >= degree R + 1.
  static Collocation for_quadrature(std::shared_ptr<const ModeSet> modes, int degree);

  int dim() const { return modes_->dim(); }
  int grid_size() const { return size_; }
  long points() const { return points_; }
  const ModeSet& modes() const { return *modes_; }

  Eigen::ArrayXd synthesize(const Eigen::VectorXcd& coeffs) const;
  Eigen::VectorXcd analyze(const Eigen::ArrayXd& values) const;
  /// Zero-mode coefficient of grid values (what analyze drops).
  double mean(const Eigen::ArrayXd& values) const { return values.mean(); }
  /// Quadrature of the grid values over the torus, volume (2pi)^d included.
  double integral(const Eigen::ArrayXd& values) const;

 private:
  void transform(std::vector<std::complex<double>>& data, bool inverse) const;

  std::shared_ptr<const ModeSet> modes_;
  int size_ = 0;
  long points_ = 0;
  std::vector<long> offsets_;  // flat grid index of each retained mode
};

/// Smallest integer >= n whose prime factors are 2, 3 and 5.
int fft_friendly_size(int n);

}  // namespace imlab
