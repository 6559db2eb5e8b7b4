#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "imlab/spectral_field.hpp"

namespace imlab {

enum class ModelVariant { Euler2DVorticity, Euler3DVelocity, GSQG, Sabra, GOY };

std::string to_string(ModelVariant v);
ModelVariant parse_variant(const std::string& name);

/// Which conservative bilinear flow du/dt = -B(u, u) is simulated, together
/// with its Galerkin truncation.
struct ModelSpec {
  ModelVariant variant = ModelVariant::Sabra;
  /// Eigenvalue cutoff N for torus models, shell count for shell models.
  int truncation = 8;
  /// gSQG exponent in K[u] = grad^perp (-Lap)^{-1+alpha} u.
  double alpha_sqg = 0.5;
  bool allow_singular = false;
  /// Shell coefficients.
  double a = 1.0;
  double b = 1.0;
  ShellGeometry shell;
  /// Constant Coriolis vector for Euler3DVelocity; zero disables the term.
  std::array<double, 3> coriolis{0.0, 0.0, 0.0};

  static ModelSpec euler2d(int cutoff);
  static ModelSpec euler3d(int cutoff);
  static ModelSpec gsqg(double alpha, int cutoff);
  static ModelSpec sabra(int shells, double a = 1.0, double b = 1.0, double lambda = 2.0,
                         double k0 = 1.0);
  static ModelSpec goy(int shells, double a = 1.0, double b = 1.0, double lambda = 2.0,
                       double k0 = 1.0);

  bool is_shell() const { return variant == ModelVariant::Sabra || variant == ModelVariant::GOY; }
  bool has_coriolis() const { return coriolis[0] != 0.0 || coriolis[1] != 0.0 || coriolis[2] != 0.0; }
  /// Throws DomainError when an invariant of the variant is violated.
  void validate() const;
  /// Zero element of the model's Galerkin space.
  SpectralField state_space() const;
  /// One-line printable form, stable across runs.
  std::string canonical() const;

  bool operator==(const ModelSpec&) const = default;
};

/// Pi_N B(u, v). The first slot is the transporting field.
SpectralField bilinear(const ModelSpec& spec, const SpectralField& u, const SpectralField& v);

/// Spatial mean of B(u, v) before truncation (the part Pi_N discards).
double bilinear_mean(const ModelSpec& spec, const SpectralField& u, const SpectralField& v);

/// K[u] for GSQG, the Biot-Savart velocity grad^perp Lap^{-1} u for
/// Euler2DVorticity.
SpectralField velocity_from_scalar(const ModelSpec& spec, const SpectralField& u);

/// Pi(f x u) for Euler3DVelocity with a Coriolis vector; zero otherwise.
SpectralField coriolis_term(const ModelSpec& spec, const SpectralField& u);

/// Right-hand side of the Galerkin flow: -B(u, u) - Pi(f x u).
SpectralField galerkin_drift(const ModelSpec& spec, const SpectralField& u);

// Conserved functionals -------------------------------------------------------

enum class FunctionalKind { Energy, SecondaryH, Casimir };

/// f for a Casimir int f(omega) dx. Polynomials are integrated exactly; a
/// callable is integrated on a grid with `oversampling` points per retained
/// wavelength.
struct CasimirFunction {
  std::vector<double> polynomial;  // coefficients of z^0, z^1, ...
  std::function<double(double)> callable;
  int oversampling = 8;

  static CasimirFunction poly(std::vector<double> coeffs) { return {std::move(coeffs), {}, 8}; }
  static CasimirFunction of(std::function<double(double)> f, int oversampling = 8) {
    return {{}, std::move(f), oversampling};
  }
};

/// 1/2 |u|^2.
double energy(const SpectralField& u);
bool has_secondary_hamiltonian(const ModelSpec& spec);
/// Weight K_i with H(u) = 1/2 sum_i K_i |u_i|^2 (times (2pi)^d on the torus).
double secondary_weight(const ModelSpec& spec, const SpectralField& space, int mode);
double secondary_hamiltonian(const ModelSpec& spec, const SpectralField& u);
/// DH(u)[v]; bilinear in (u, v) because H is quadratic.
double secondary_derivative(const ModelSpec& spec, const SpectralField& u, const SpectralField& v);
double casimir(const SpectralField& u, const CasimirFunction& f);

// Structure verification ------------------------------------------------------

struct StructureCheck {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct StructureReport {
  ModelSpec spec;
  int trials = 0;
  std::vector<StructureCheck> checks;

  bool pass() const;
};

/// Randomized check of antisymmetry, cancellation, zero mean, divergence-free
/// output and bilinearity on `trials` random states. Violations are relative.
StructureReport verify_structure(const ModelSpec& spec, int trials, std::uint64_t seed,
                                 double tolerance = 1e-10);

}  // namespace imlab
