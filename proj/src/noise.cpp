#include "imlab/noise.hpp"

#include <cmath>
#include <numbers>

#include "imlab/errors.hpp"

namespace imlab {

double NoiseSpec::amplitude_at(double wavenumber, int mode) const {
  switch (law) {
    case Law::Exponential: return scale * amplitude * std::exp(-gamma * wavenumber);
    case Law::Algebraic: return scale * amplitude * std::pow(wavenumber, -power);
    case Law::Table:
      return mode >= 0 && mode < static_cast<int>(table.size()) ? scale * table[static_cast<std::size_t>(mode)] : 0.0;
  }
  return 0.0;
}

void NoiseSpec::validate() const {
  if (!std::isfinite(amplitude) || !std::isfinite(scale)) throw DomainError("noise amplitude must be finite");
  if (law == Law::Exponential && gamma < 0.0) throw DomainError("noise gamma must be >= 0");
  if (law == Law::Algebraic && power <= 0.0) throw DomainError("algebraic noise needs r > 0");
}

namespace {

// Unit real vector orthogonal to m, as close to p as the projection allows.
Eigen::VectorXd polarize(const std::array<double, 3>& p, const Mode& m, int k) {
  Eigen::VectorXd mv(k), pv(k);
  for (int l = 0; l < k; ++l) {
    mv(l) = m[static_cast<std::size_t>(l)];
    pv(l) = p[static_cast<std::size_t>(l)];
  }
  auto project = [&](Eigen::VectorXd v) { return Eigen::VectorXd(v - mv * (mv.dot(v) / mv.squaredNorm())); };
  Eigen::VectorXd out = project(pv);
  for (int l = 0; out.norm() < 1e-12 * pv.norm() && l < k; ++l) out = project(Eigen::VectorXd::Unit(k, l));
  return out / out.norm();
}

}  // namespace

NoiseModel::NoiseModel(const NoiseSpec& spec, const SpectralField& space) : space_(space.zeros_like()) {
  spec.validate();
  const int k = space.components();
  if (space.is_shell()) {
    for (int n = 0; n < space.size(); ++n) {
      const double a = spec.amplitude_at(n + 1, n) / std::numbers::sqrt2;
      for (Complex v : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
        Direction d;
        d.mode = d.partner = n;
        d.value = Eigen::VectorXcd::Constant(1, v);
        d.amplitude = a;
        dirs_.push_back(d);
      }
    }
  } else {
    const double norm = 1.0 / (std::numbers::sqrt2 * std::pow(2.0 * std::numbers::pi, 0.5 * space.dim()));
    for (int i = 0; i < space.size(); ++i) {
      if (!space.modes().is_positive(i)) continue;
      const Mode& m = space.modes().mode(i);
      Eigen::VectorXd pol = Eigen::VectorXd::Ones(1);
      if (space.kind() == FieldKind::TorusVector) pol = polarize(spec.polarization, m, k);
      const double a = spec.amplitude_at(space.wavenumber(i), i);
      // sqrt2 cos(m.x): norm at +-m; sqrt2 sin(m.x): -i norm at m.
      for (Complex v : {Complex(norm, 0.0), Complex(0.0, -norm)}) {
        Direction d;
        d.mode = i;
        d.partner = space.modes().negated(i);
        d.value = pol.cast<Complex>() * v;
        d.amplitude = a;
        dirs_.push_back(d);
      }
    }
  }
  for (const auto& d : dirs_) total_ += d.amplitude * d.amplitude;
}

SpectralField NoiseModel::direction(int k) const {
  SpectralField out = space_;
  add(out, k, 1.0);
  return out;
}

double NoiseModel::project(const SpectralField& u, int k) const {
  const Direction& d = dirs_[static_cast<std::size_t>(k)];
  double dot = 0.0;
  for (int c = 0; c < u.components(); ++c) dot += (u.at(d.mode, c) * std::conj(d.value(c))).real();
  if (u.is_shell()) return dot;
  return 2.0 * std::pow(2.0 * std::numbers::pi, u.dim()) * dot;
}

void NoiseModel::add(SpectralField& u, int k, double c) const {
  const Direction& d = dirs_[static_cast<std::size_t>(k)];
  for (int l = 0; l < u.components(); ++l) {
    u.at(d.mode, l) += c * d.value(l);
    if (d.partner != d.mode) u.at(d.partner, l) += c * std::conj(d.value(l));
  }
}

SpectralField NoiseModel::increment(double dt, std::mt19937_64& rng) const {
  if (!(dt > 0.0)) throw DomainError("noise increment needs dt > 0");
  std::normal_distribution<double> gauss;
  SpectralField out = space_;
  const double root = std::sqrt(dt);
  for (int k = 0; k < size(); ++k) {
    const double z = gauss(rng);
    if (amplitude(k) != 0.0) add(out, k, amplitude(k) * root * z);
  }
  return out;
}

double NoiseModel::quadratic_form(const SpectralField& u) const {
  double sum = 0.0;
  for (int k = 0; k < size(); ++k) {
    const double p = project(u, k);
    sum += amplitude(k) * amplitude(k) * p * p;
  }
  return sum;
}

double NoiseModel::weighted_total(const std::function<double(int)>& w) const {
  double sum = 0.0;
  for (int k = 0; k < size(); ++k) sum += amplitude(k) * amplitude(k) * w(k);
  return sum;
}

}  // namespace imlab
