#pragma once

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "imlab/spectral_field.hpp"

namespace imlab {

/// Amplitude law of the noise zeta_N = sum_k a_k psi_k beta_k.
struct NoiseSpec {
  enum class Law { Exponential, Algebraic, Table };

  Law law = Law::Exponential;
  double amplitude = 1.0;  // A
  double gamma = 0.7;      // exponential rate in |m| (shell index n for shells)
  double power = 2.0;      // algebraic exponent r in A |m|^{-r}
  /// Explicit amplitudes by mode index (Table law); missing entries are 0.
  std::vector<double> table;
  /// Overall factor lambda multiplying every a_m.
  double scale = 1.0;
  /// Direction a_m^l for vector states before Leray projection.
  std::array<double, 3> polarization{1.0, 1.4142135623730951, 1.7320508075688772};

  static NoiseSpec exponential(double amplitude = 1.0, double gamma = 0.7) {
    NoiseSpec n;
    n.amplitude = amplitude;
    n.gamma = gamma;
    return n;
  }
  static NoiseSpec zero() { return exponential(0.0); }

  /// a at wavenumber |m| (torus) or shell number n, table index `mode`.
  double amplitude_at(double wavenumber, int mode) const;
  void validate() const;
  bool operator==(const NoiseSpec&) const = default;
};

/// The noise directions of a Galerkin space: an L2-orthonormal real basis psi_k
/// with amplitudes a_k.
///
/// Torus: for the representative m of each {m, -m} pair, psi = sqrt2 cos(m.x)
/// and psi = sqrt2 sin(m.x), normalized by (2pi)^{-d/2}, both with amplitude a_m
/// (vector states multiply by the unit Leray-projected polarization). Shells:
/// psi = e_n and i e_n, each with amplitude a_n / sqrt2. In both cases
/// A_{0,N} = sum_k a_k^2 = sum over retained modes of a_m^2.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(const NoiseSpec& spec, const SpectralField& space);

  int size() const { return static_cast<int>(dirs_.size()); }
  double amplitude(int k) const { return dirs_[static_cast<std::size_t>(k)].amplitude; }
  /// Mode index carrying direction k.
  int mode(int k) const { return dirs_[static_cast<std::size_t>(k)].mode; }
  /// A_{0,N} = sum_k a_k^2.
  double total_variance() const { return total_; }
  const SpectralField& space() const { return space_; }

  SpectralField direction(int k) const;
  /// <u, psi_k>.
  double project(const SpectralField& u, int k) const;
  /// u += c psi_k.
  void add(SpectralField& u, int k, double c) const;

  /// sqrt(dt) sum_k a_k xi_k psi_k with xi_k standard normal.
  SpectralField increment(double dt, std::mt19937_64& rng) const;
  /// Q(u) = sum_k a_k^2 <u, psi_k>^2.
  double quadratic_form(const SpectralField& u) const;
  /// sum_k a_k^2 w(k), e.g. A^H with w = D^2 H[psi_k, psi_k].
  double weighted_total(const std::function<double(int)>& w) const;

 private:
  struct Direction {
    int mode = 0;
    int partner = 0;           // index of -m (== mode for shells)
    Eigen::VectorXcd value;    // coefficient at `mode` per component
    double amplitude = 0.0;
  };

  SpectralField space_;
  std::vector<Direction> dirs_;
  double total_ = 0.0;
};

}  // namespace imlab
