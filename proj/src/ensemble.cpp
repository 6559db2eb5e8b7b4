#include "imlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imlab/errors.hpp"
#include "imlab/parallel.hpp"
#include "imlab/spectral_ops.hpp"

namespace imlab {

double EnsembleSpec::radius() const { return xi(diss, static_cast<double>(i + j)); }
double EnsembleSpec::local_time() const { return c_T / radius(); }
double EnsembleSpec::horizon() const { return std::exp(static_cast<double>(j)); }

EnsembleSpec EnsembleSpec::with(int i_new, int j_new) const {
  EnsembleSpec s = *this;
  s.i = i_new;
  s.j = j_new;
  return s;
}

void EnsembleSpec::validate() const {
  if (i < 1 || j < 1) throw DomainError("ensemble indices i and j must be positive");
  if (r < 0.0 || r > diss.s_star) throw DomainError("ensemble index r must lie in [0, s_star]");
  if (!(c_T > 0.0)) throw DomainError("ensemble local-time constant c_T must be > 0");
  diss.validate();
  if (horizon() / local_time() > 1e6) throw DomainError("ensemble horizon e^j needs more than 1e6 local steps");
}

bool ball_membership(const SpectralField& u, const EnsembleSpec& spec) { return hs_norm(u, spec.r) <= spec.radius(); }

namespace {

// Norms along phi_{kT} u0 for k = 0 .. K in the direction `sign`.
std::vector<double> orbit_norms(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                                const IntegratorConfig& cfg, double sign, long K) {
  if (K == 0) return {hs_norm(u0, spec.r)};
  const double T = spec.local_time();
  FlowOptions fo;
  for (long k = 0; k <= K; ++k) fo.output_times.push_back(sign * static_cast<double>(k) * T);
  const double r = spec.r;
  fo.observers.push_back({"hr", [r](const SpectralField& u) { return hs_norm(u, r); }});
  return deterministic_flow(model, u0, 0.0, fo.output_times.back(), cfg, fo).record.at("hr");
}

}  // namespace

SigmaMembership sigma_membership(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                                 const IntegratorConfig& cfg) {
  spec.validate();
  SigmaMembership out;
  out.member = true;
  const double R = spec.radius();
  const double T = spec.local_time();
  const long K = static_cast<long>(std::floor(spec.horizon() / T * (1.0 + 1e-12)));
  for (double sign : {1.0, -1.0}) {
    std::vector<double> norms;
    try {
      norms = orbit_norms(u0, spec, model, cfg, sign, K);
    } catch (const Error& e) {
      out.member = false;
      out.diagnostic = std::string("flow failed: ") + e.what();
      return out;
    }
    for (std::size_t k = 0; k < norms.size(); ++k) {
      out.max_norm = std::max(out.max_norm, norms[k]);
      if (norms[k] > R) {
        const long signed_k = static_cast<long>(sign) * static_cast<long>(k);
        if (out.member || std::labs(signed_k) < std::labs(out.first_violation)) {
          out.first_violation = signed_k;
          out.first_violation_time = static_cast<double>(signed_k) * T;
        }
        out.member = false;
        break;
      }
    }
  }
  if (!out.member && out.diagnostic.empty()) {
    std::ostringstream d;
    d << "left the H^" << spec.r << " ball of radius " << R << " at k = " << out.first_violation;
    out.diagnostic = d.str();
  }
  return out;
}

SigmaMembership sigma_i_membership(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                                   const IntegratorConfig& cfg) {
  SigmaMembership last;
  for (int j = 1; j <= spec.j; ++j) {
    last = sigma_membership(u0, spec.with(spec.i, j), model, cfg);
    if (!last.member) {
      last.diagnostic = "j = " + std::to_string(j) + ": " + last.diagnostic;
      return last;
    }
  }
  return last;
}

std::vector<double> slow_growth_grid(const EnsembleSpec& spec, int samples) {
  std::vector<double> grid;
  for (int k = 0; k < samples; ++k) grid.push_back(spec.horizon() * k / samples);
  grid.push_back(spec.horizon());
  return grid;
}

SlowGrowth slow_growth_check(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                             const std::vector<double>& t_grid, const IntegratorConfig& cfg) {
  SlowGrowth out;
  const SigmaMembership pre = sigma_i_membership(u0, spec, model, cfg);
  if (!pre.member) {
    out.detail = "skipped: initial datum is not a member (" + pre.diagnostic + ")";
    return out;
  }
  out.checked = true;
  const double r = spec.r;
  auto bound = [&](double t) { return 2.0 * xi(spec.diss, 1.0 + spec.i + std::log1p(std::abs(t))); };
  std::vector<double> fwd, bwd;
  for (double t : t_grid) (t >= 0.0 ? fwd : bwd).push_back(t);
  std::sort(fwd.begin(), fwd.end());
  std::sort(bwd.begin(), bwd.end(), std::greater<>());
  out.pass = true;
  for (auto* times : {&fwd, &bwd}) {
    if (times->empty()) continue;
    FlowOptions fo;
    fo.output_times = *times;
    if (fo.output_times.front() != 0.0) fo.output_times.insert(fo.output_times.begin(), 0.0);
    fo.observers.push_back({"hr", [r](const SpectralField& u) { return hs_norm(u, r); }});
    try {
      const FlowResult run = deterministic_flow(model, u0, 0.0, fo.output_times.back(), cfg, fo);
      const auto& hr = run.record.at("hr");
      for (std::size_t k = 0; k < hr.size(); ++k) {
        const double t = run.record.times[k];
        const double ratio = hr[k] / bound(t);
        if (ratio > out.max_ratio) out.max_ratio = ratio;
        if (ratio > 1.0 && out.pass) {
          out.pass = false;
          out.fail_time = t;
        }
      }
    } catch (const Error& e) {
      out.pass = false;
      out.detail = std::string("flow failed: ") + e.what();
      return out;
    }
  }
  std::ostringstream d;
  d << "max |u(t)|_{H^r} / 2 xi(1 + i + ln(1 + |t|)) = " << out.max_ratio;
  out.detail = d.str();
  return out;
}

Harvest ensemble_harvest(const std::vector<SpectralField>& snapshots, const EnsembleSpec& spec,
                         const ModelSpec& model, const IntegratorConfig& cfg, const std::vector<int>& i_list) {
  Harvest out;
  out.monotone.check = "ensemble_complement_monotone";
  out.monotone.paper_ref = "complement of Sigma^i has mass at most C e^{-2i}";
  const int K = static_cast<int>(snapshots.size());
  for (std::size_t a = 0; a < i_list.size(); ++a) {
    HarvestRow row;
    row.i = i_list[a];
    row.total = K;
    const EnsembleSpec s = spec.with(row.i, spec.j);
    std::vector<char> in(static_cast<std::size_t>(K), 0);
    parallel_for(K, [&](int k) {
      in[static_cast<std::size_t>(k)] = sigma_i_membership(snapshots[static_cast<std::size_t>(k)], s, model, cfg).member;
    });
    for (int k = 0; k < K; ++k) {
      if (in[static_cast<std::size_t>(k)]) {
        ++row.members;
        row.member_indices.push_back(k);
      }
    }
    row.defined = K > 0;
    row.complement_fraction = row.defined ? 1.0 - static_cast<double>(row.members) / K : 0.0;
    out.rows.push_back(row);
  }
  if (K == 0) {
    out.monotone.status = Status::Inconclusive;
    out.monotone.detail = "empty reservoir: complement fraction undefined";
    return out;
  }
  out.monotone.status = Status::Pass;
  for (std::size_t a = 1; a < out.rows.size(); ++a) {
    if (out.rows[a].i > out.rows[a - 1].i && out.rows[a].complement_fraction > out.rows[a - 1].complement_fraction) {
      out.monotone.status = Status::Fail;
    }
  }
  if (!out.rows.empty()) out.monotone.estimate = out.rows.back().complement_fraction;
  out.monotone.detail = "complement fraction over the i list";
  return out;
}

std::vector<PersistenceRow> regularity_persistence_check(const SpectralField& u0, const ModelSpec& model,
                                                          const std::vector<double>& m_list, double horizon,
                                                          const DissipationSpec& diss, const IntegratorConfig& cfg,
                                                          int checkpoints) {
  if (model.variant != ModelVariant::Euler3DVelocity) {
    throw CapabilityError("regularity persistence is a 3D Euler check");
  }
  if (!(horizon > 0.0) || checkpoints < 2) throw DomainError("persistence check needs horizon > 0 and 2+ checkpoints");
  FlowOptions fo;
  for (int k = 0; k < checkpoints; ++k) fo.output_times.push_back(horizon * k / checkpoints);
  fo.output_times.push_back(horizon);
  for (double m : m_list) {
    fo.observers.push_back({"h" + std::to_string(m), [m](const SpectralField& u) { return hs_norm(u, m); }});
  }
  const FlowResult run = deterministic_flow(model, u0, 0.0, horizon, cfg, fo);
  const auto& times = run.record.times;

  // I(t) = int_0^t xi(1 + s) ds by the trapezoid rule between checkpoints.
  std::vector<double> I(times.size(), 0.0);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const int sub = 64;
    const double h = (times[k] - times[k - 1]) / sub;
    double acc = 0.0;
    for (int q = 0; q <= sub; ++q) {
      const double w = q == 0 || q == sub ? 0.5 : 1.0;
      acc += w * xi(diss, 1.0 + times[k - 1] + q * h);
    }
    I[k] = I[k - 1] + acc * h;
  }

  std::vector<PersistenceRow> rows;
  for (double m : m_list) {
    PersistenceRow row;
    row.m = m;
    const auto& n = run.record.at("h" + std::to_string(m));
    if (n[0] == 0.0) {
      row.pass = true;
      rows.push_back(row);
      continue;
    }
    row.c_tilde = std::max(0.0, std::log(n[1] / n[0]) / I[1]);
    row.pass = true;
    for (std::size_t k = 0; k < n.size(); ++k) {
      const double envelope = n[0] * std::exp(row.c_tilde * I[k]);
      const double ratio = n[k] / envelope;
      row.max_ratio = std::max(row.max_ratio, ratio);
      if (ratio > 1.0 + 1e-8) row.pass = false;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace imlab
