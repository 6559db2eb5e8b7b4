#include "imlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "imlab/collocation.hpp"
#include "imlab/errors.hpp"
#include "imlab/spectral_ops.hpp"

namespace imlab {

namespace {

constexpr double kTiny = 1e-300;

double torus_volume(int dim) { return std::pow(2.0 * std::numbers::pi, dim); }

void require_kind(const ModelSpec& spec, const SpectralField& u, const char* op) {
  bool ok = false;
  switch (spec.variant) {
    case ModelVariant::Euler2DVorticity:
    case ModelVariant::GSQG:
      ok = u.kind() == FieldKind::TorusScalar && u.dim() == 2;
      break;
    case ModelVariant::Euler3DVelocity:
      ok = u.kind() == FieldKind::TorusVector && u.dim() == 3 && u.components() == 3;
      break;
    case ModelVariant::Sabra:
    case ModelVariant::GOY:
      ok = u.is_shell();
      break;
  }
  if (!ok) throw ShapeError(std::string(op) + ": state kind does not match " + to_string(spec.variant));
}

// Shell value with the boundary convention u_n = 0 outside 1..N.
Complex shell_at(const SpectralField& u, int n) {
  return (n >= 1 && n <= u.size()) ? u.at(n - 1) : Complex(0.0, 0.0);
}

SpectralField sabra_bilinear(const ModelSpec& spec, const SpectralField& u, const SpectralField& v) {
  const double a = spec.a, b = spec.b, lam = spec.shell.lambda;
  const Complex mik0(0.0, -spec.shell.k0);
  SpectralField out = u.zeros_like();
  for (int j = 1; j <= u.size(); ++j) {
    const double pj = std::pow(lam, j);
    const Complex s = a * pj * lam * shell_at(v, j + 2) * std::conj(shell_at(u, j + 1)) +
                      b * pj * shell_at(v, j + 1) * std::conj(shell_at(u, j - 1)) +
                      a * pj / lam * shell_at(u, j - 1) * shell_at(v, j - 2) +
                      b * pj / lam * shell_at(v, j - 1) * shell_at(u, j - 2);
    out.at(j - 1) = mik0 * s;
  }
  return out;
}

// GOY as -i k0 conj(M_u v) with M_u antisymmetric: every triad (n, n+1, n+2)
// carries weight lambda^{n+1} and couplings a u_{n+1} on (n, n+2) and b u_n on
// (n+1, n+2). On the diagonal u = v this is the standard GOY right-hand side.
SpectralField goy_bilinear(const ModelSpec& spec, const SpectralField& u, const SpectralField& v) {
  const double a = spec.a, b = spec.b, lam = spec.shell.lambda;
  const Complex mik0(0.0, -spec.shell.k0);
  SpectralField out = u.zeros_like();
  for (int j = 1; j <= u.size(); ++j) {
    const double pj = std::pow(lam, j);
    const Complex s = a * pj * lam * shell_at(u, j + 1) * shell_at(v, j + 2) +
                      b * pj * shell_at(u, j - 1) * shell_at(v, j + 1) -
                      a * pj / lam * shell_at(u, j - 1) * shell_at(v, j - 2) -
                      b * pj / lam * shell_at(u, j - 2) * shell_at(v, j - 1);
    out.at(j - 1) = mik0 * std::conj(s);
  }
  return out;
}

// Unprojected transport product on a de-aliased grid; returns grid values per
// output component.
std::vector<Eigen::ArrayXd> transport_values(const ModelSpec& spec, const SpectralField& u,
                                             const SpectralField& v, const Collocation& grid) {
  std::vector<Eigen::ArrayXd> out;
  if (spec.variant == ModelVariant::Euler3DVelocity) {
    std::vector<Eigen::ArrayXd> vel;
    for (int l = 0; l < 3; ++l) vel.push_back(grid.synthesize(u.coeffs().col(l)));
    for (int c = 0; c < 3; ++c) {
      Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(grid.points());
      for (int l = 0; l < 3; ++l) {
        std::array<int, 3> orders{0, 0, 0};
        orders[static_cast<std::size_t>(l)] = 1;
        acc += vel[static_cast<std::size_t>(l)] * synthesize_derivative(grid, v, c, orders);
      }
      out.push_back(std::move(acc));
    }
    return out;
  }
  const SpectralField vel = velocity_from_scalar(spec, u);
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(grid.points());
  for (int l = 0; l < 2; ++l) {
    std::array<int, 3> orders{0, 0, 0};
    orders[static_cast<std::size_t>(l)] = 1;
    acc += grid.synthesize(vel.coeffs().col(l)) * synthesize_derivative(grid, v, 0, orders);
  }
  out.push_back(std::move(acc));
  return out;
}

double relative(double violation, double scale) { return violation == 0.0 ? 0.0 : violation / (scale + kTiny); }

}  // namespace

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Euler2DVorticity: return "euler2d";
    case ModelVariant::Euler3DVelocity: return "euler3d";
    case ModelVariant::GSQG: return "gsqg";
    case ModelVariant::Sabra: return "sabra";
    case ModelVariant::GOY: return "goy";
  }
  return "?";
}

ModelVariant parse_variant(const std::string& name) {
  for (auto v : {ModelVariant::Euler2DVorticity, ModelVariant::Euler3DVelocity, ModelVariant::GSQG,
                 ModelVariant::Sabra, ModelVariant::GOY}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown model variant '" + name + "' (expected euler2d, euler3d, gsqg, sabra, goy)");
}

ModelSpec ModelSpec::euler2d(int cutoff) {
  ModelSpec s;
  s.variant = ModelVariant::Euler2DVorticity;
  s.truncation = cutoff;
  return s;
}

ModelSpec ModelSpec::euler3d(int cutoff) {
  ModelSpec s;
  s.variant = ModelVariant::Euler3DVelocity;
  s.truncation = cutoff;
  return s;
}

ModelSpec ModelSpec::gsqg(double alpha, int cutoff) {
  ModelSpec s;
  s.variant = ModelVariant::GSQG;
  s.alpha_sqg = alpha;
  s.truncation = cutoff;
  return s;
}

ModelSpec ModelSpec::sabra(int shells, double a, double b, double lambda, double k0) {
  ModelSpec s;
  s.variant = ModelVariant::Sabra;
  s.truncation = shells;
  s.a = a;
  s.b = b;
  s.shell = {k0, lambda};
  return s;
}

ModelSpec ModelSpec::goy(int shells, double a, double b, double lambda, double k0) {
  ModelSpec s = sabra(shells, a, b, lambda, k0);
  s.variant = ModelVariant::GOY;
  return s;
}

void ModelSpec::validate() const {
  if (truncation < 1) throw DomainError("truncation must be >= 1");
  if (variant == ModelVariant::GSQG && alpha_sqg > 0.5 && !allow_singular) {
    throw DomainError("gSQG needs alpha_sqg <= 1/2; pass --allow-singular to go beyond");
  }
  if (is_shell()) {
    if (!(shell.lambda > 1.0)) throw DomainError("shell lambda must be > 1");
    if (!(shell.k0 > 0.0)) throw DomainError("shell k0 must be > 0");
  }
  if (has_coriolis() && variant != ModelVariant::Euler3DVelocity) {
    throw DomainError("a Coriolis vector is only meaningful for euler3d");
  }
}

SpectralField ModelSpec::state_space() const {
  validate();
  switch (variant) {
    case ModelVariant::Euler2DVorticity:
    case ModelVariant::GSQG:
      return SpectralField::torus_scalar(2, truncation);
    case ModelVariant::Euler3DVelocity:
      return SpectralField::torus_vector(3, truncation, 3);
    case ModelVariant::Sabra:
    case ModelVariant::GOY:
      return SpectralField::shell(truncation, shell);
  }
  throw DomainError("unknown variant");
}

std::string ModelSpec::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(variant) << "(N=" << truncation;
  if (variant == ModelVariant::GSQG) out << ", alpha_sqg=" << alpha_sqg;
  if (is_shell()) out << ", a=" << a << ", b=" << b << ", lambda=" << shell.lambda << ", k0=" << shell.k0;
  if (has_coriolis()) out << ", f=(" << coriolis[0] << "," << coriolis[1] << "," << coriolis[2] << ")";
  out << ")";
  return out.str();
}

SpectralField velocity_from_scalar(const ModelSpec& spec, const SpectralField& u) {
  if (spec.variant != ModelVariant::GSQG && spec.variant != ModelVariant::Euler2DVorticity) {
    throw CapabilityError("velocity_from_scalar needs an active scalar model");
  }
  require_kind(spec, u, "velocity_from_scalar");
  SpectralField vel = SpectralField::torus_vector(2, u.cutoff(), 2);
  for (int i = 0; i < u.size(); ++i) {
    const Mode& m = u.modes().mode(i);
    const double m2 = u.modes().norm_sq(i);
    if (spec.variant == ModelVariant::Euler2DVorticity) {
      // grad^perp Lap^{-1}: (-d2, d1) times -1/|m|^2.
      vel.at(i, 0) = Complex(0.0, m[1] / m2) * u.at(i);
      vel.at(i, 1) = Complex(0.0, -m[0] / m2) * u.at(i);
    } else {
      const double w = std::pow(m2, spec.alpha_sqg - 1.0);
      vel.at(i, 0) = Complex(0.0, -m[1] * w) * u.at(i);
      vel.at(i, 1) = Complex(0.0, m[0] * w) * u.at(i);
    }
  }
  return vel;
}

SpectralField bilinear(const ModelSpec& spec, const SpectralField& u, const SpectralField& v) {
  require_kind(spec, u, "bilinear");
  u.require_same_space(v, "bilinear");
  if (spec.variant == ModelVariant::Sabra) return sabra_bilinear(spec, u, v);
  if (spec.variant == ModelVariant::GOY) return goy_bilinear(spec, u, v);

  const Collocation grid = Collocation::for_products(u.mode_set(), 2);
  const auto values = transport_values(spec, u, v, grid);
  SpectralField out = u.zeros_like();
  for (int c = 0; c < out.components(); ++c) out.coeffs().col(c) = grid.analyze(values[static_cast<std::size_t>(c)]);
  if (spec.variant == ModelVariant::Euler3DVelocity) out = leray_project(out);
  out.enforce_reality();
  return out;
}

double bilinear_mean(const ModelSpec& spec, const SpectralField& u, const SpectralField& v) {
  require_kind(spec, u, "bilinear_mean");
  if (spec.is_shell()) return 0.0;
  const Collocation grid = Collocation::for_products(u.mode_set(), 2);
  double worst = 0.0;
  for (const auto& vals : transport_values(spec, u, v, grid)) worst = std::max(worst, std::abs(grid.mean(vals)));
  return worst;
}

SpectralField coriolis_term(const ModelSpec& spec, const SpectralField& u) {
  SpectralField out = u.zeros_like();
  if (!spec.has_coriolis()) return out;
  require_kind(spec, u, "coriolis_term");
  const auto& f = spec.coriolis;
  for (int i = 0; i < u.size(); ++i) {
    out.at(i, 0) = f[1] * u.at(i, 2) - f[2] * u.at(i, 1);
    out.at(i, 1) = f[2] * u.at(i, 0) - f[0] * u.at(i, 2);
    out.at(i, 2) = f[0] * u.at(i, 1) - f[1] * u.at(i, 0);
  }
  return leray_project(out);
}

SpectralField galerkin_drift(const ModelSpec& spec, const SpectralField& u) {
  SpectralField out = -bilinear(spec, u, u);
  if (spec.has_coriolis()) out -= coriolis_term(spec, u);
  return out;
}

double energy(const SpectralField& u) { return 0.5 * l2_norm_sq(u); }

bool has_secondary_hamiltonian(const ModelSpec& spec) {
  if (spec.is_shell()) return spec.a + spec.b != 0.0 && std::abs(spec.a / (spec.a + spec.b)) < 1.0;
  return spec.variant == ModelVariant::GSQG || spec.variant == ModelVariant::Euler2DVorticity;
}

double secondary_weight(const ModelSpec& spec, const SpectralField& space, int mode) {
  if (!has_secondary_hamiltonian(spec)) {
    throw CapabilityError("no secondary Hamiltonian for " + spec.canonical());
  }
  if (spec.is_shell()) return std::pow(-spec.a / (spec.a + spec.b), mode + 1);
  const double exponent = spec.variant == ModelVariant::GSQG ? spec.alpha_sqg - 1.0 : -1.0;
  return std::pow(static_cast<double>(space.modes().norm_sq(mode)), exponent);
}

double secondary_derivative(const ModelSpec& spec, const SpectralField& u, const SpectralField& v) {
  require_kind(spec, u, "secondary_hamiltonian");
  u.require_same_space(v, "secondary_derivative");
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    sum += secondary_weight(spec, u, i) * (u.coeffs().row(i).array() * v.coeffs().row(i).array().conjugate()).real().sum();
  }
  return spec.is_shell() ? sum : torus_volume(u.dim()) * sum;
}

double secondary_hamiltonian(const ModelSpec& spec, const SpectralField& u) {
  return 0.5 * secondary_derivative(spec, u, u);
}

double casimir(const SpectralField& u, const CasimirFunction& f) {
  if (u.kind() != FieldKind::TorusScalar) throw CapabilityError("casimir needs an active scalar state");
  const int r = u.modes().max_component();
  if (!f.polynomial.empty()) {
    const int degree = static_cast<int>(f.polynomial.size()) - 1;
    const Collocation grid = Collocation::for_quadrature(u.mode_set(), std::max(degree, 1));
    const Eigen::ArrayXd w = grid.synthesize(u.coeffs().col(0));
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(w.size());
    for (auto it = f.polynomial.rbegin(); it != f.polynomial.rend(); ++it) acc = acc * w + *it;  // Horner
    return grid.integral(acc);
  }
  if (!f.callable) throw DomainError("casimir function has neither coefficients nor a callable");
  const Collocation grid(u.mode_set(), fft_friendly_size(std::max(f.oversampling, 1) * (2 * r + 1)));
  const Eigen::ArrayXd w = grid.synthesize(u.coeffs().col(0));
  return grid.integral(w.unaryExpr(f.callable));
}

bool StructureReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const StructureCheck& c) { return c.pass; });
}

StructureReport verify_structure(const ModelSpec& spec, int trials, std::uint64_t seed, double tolerance) {
  StructureReport report;
  report.spec = spec;
  report.trials = trials;
  const SpectralField space = spec.state_space();
  std::mt19937_64 rng(seed);

  double antisym = 0, cancel = 0, mean = 0, div = 0, bilin = 0;
  for (int t = 0; t < trials; ++t) {
    const SpectralField u = random_field(space, rng);
    const SpectralField v = random_field(space, rng);
    const SpectralField w = random_field(space, rng);
    const double nu = std::sqrt(l2_norm_sq(u)), nw = std::sqrt(l2_norm_sq(w));

    const SpectralField bvu = bilinear(spec, v, u);
    const SpectralField bvw = bilinear(spec, v, w);
    const double lhs = inner_product(bvu, w), rhs = inner_product(bvw, u);
    const double scale = std::sqrt(l2_norm_sq(bvu)) * nw + std::sqrt(l2_norm_sq(bvw)) * nu;
    antisym = std::max(antisym, relative(std::abs(lhs + rhs), scale));

    const SpectralField buu = bilinear(spec, u, u);
    const double nb = std::sqrt(l2_norm_sq(buu));
    cancel = std::max(cancel, relative(std::abs(inner_product(buu, u)), nb * nu));

    if (!spec.is_shell()) {
      const double rms = nb / std::sqrt(torus_volume(u.dim()));
      mean = std::max(mean, relative(bilinear_mean(spec, u, u), rms));
    }
    if (buu.kind() == FieldKind::TorusVector) {
      double amp = 0.0;
      for (int i = 0; i < buu.size(); ++i) amp = std::max(amp, buu.wavenumber(i) * buu.coeffs().row(i).norm());
      div = std::max(div, relative(divergence_defect(buu), amp));
    }

    const double alpha = 0.7, beta = -1.3;
    const SpectralField combo = bilinear(spec, u, alpha * v + beta * w);
    const SpectralField buv = bilinear(spec, u, v), buw = bilinear(spec, u, w);
    const double s2 = std::abs(alpha) * std::sqrt(l2_norm_sq(buv)) + std::abs(beta) * std::sqrt(l2_norm_sq(buw));
    bilin = std::max(bilin, relative(std::sqrt(l2_norm_sq(combo - alpha * buv - beta * buw)), s2));
    const SpectralField combo1 = bilinear(spec, alpha * v + beta * w, u);
    const SpectralField bwu = bilinear(spec, w, u);
    const double s1 = std::abs(alpha) * std::sqrt(l2_norm_sq(bvu)) + std::abs(beta) * std::sqrt(l2_norm_sq(bwu));
    bilin = std::max(bilin, relative(std::sqrt(l2_norm_sq(combo1 - alpha * bvu - beta * bwu)), s1));
  }

  auto add = [&](const char* name, double v) {
    report.checks.push_back({name, v, tolerance, v <= tolerance});
  };
  add("antisymmetry", antisym);
  add("cancellation", cancel);
  add("zero_mean", mean);
  add("divergence_free", div);
  add("bilinearity", bilin);
  return report;
}

}  // namespace imlab
