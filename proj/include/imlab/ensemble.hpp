#pragma once

#include <string>
#include <vector>

#include "imlab/dissipation.hpp"
#include "imlab/integrator.hpp"
#include "imlab/verdict.hpp"

namespace imlab {

/// B^{i,j}: the H^r ball of radius xi(i + j). Sigma^{i,j}: data whose orbit
/// stays in that ball at every multiple of the local time T = c_T / xi(i + j)
/// up to |t| = e^j.
struct EnsembleSpec {
  int i = 4;
  int j = 2;
  double r = 4.0;
  double c_T = 0.5;
  DissipationSpec diss;

  double radius() const;
  double local_time() const;
  double horizon() const;
  EnsembleSpec with(int i_new, int j_new) const;
  void validate() const;
  bool operator==(const EnsembleSpec&) const = default;
};

bool ball_membership(const SpectralField& u, const EnsembleSpec& spec);

struct SigmaMembership {
  bool member = false;
  /// Signed multiple k of T at which the orbit first left the ball (0 if none).
  long first_violation = 0;
  double first_violation_time = 0.0;
  double max_norm = 0.0;
  std::string diagnostic;
};

/// Checks phi_{kT} u0 in B^{i,j} for every integer k with |k| T <= e^j, forward
/// and backward. A diverging flow counts as non-membership.
SigmaMembership sigma_membership(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                                 const IntegratorConfig& cfg);

/// Membership in Sigma^{i,j} for every j = 1 .. spec.j (the budgeted stand-in
/// for the intersection over all j).
SigmaMembership sigma_i_membership(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                                   const IntegratorConfig& cfg);

struct SlowGrowth {
  bool checked = false;  // false when u0 failed the membership precondition
  bool pass = false;
  double max_ratio = 0.0;
  double fail_time = 0.0;
  std::string detail;
};

/// |phi_t u0|_{H^r} <= 2 xi(1 + i + ln(1 + |t|)) at each grid time (both signs
/// when the grid holds negative times). Runs only on Sigma^i members.
SlowGrowth slow_growth_check(const SpectralField& u0, const EnsembleSpec& spec, const ModelSpec& model,
                             const std::vector<double>& t_grid, const IntegratorConfig& cfg);
/// `samples` + 1 uniform times in [0, e^j].
std::vector<double> slow_growth_grid(const EnsembleSpec& spec, int samples = 40);

struct HarvestRow {
  int i = 0;
  long members = 0;
  long total = 0;
  double complement_fraction = 0.0;
  bool defined = false;
  /// Reservoir indices of the members.
  std::vector<int> member_indices;
};

struct Harvest {
  std::vector<HarvestRow> rows;
  Verdict monotone;
};

/// Filters snapshots by Sigma^i membership for each i (j = 1 .. spec.j) on the
/// worker pool; the complement fraction must be nonincreasing in i.
Harvest ensemble_harvest(const std::vector<SpectralField>& snapshots, const EnsembleSpec& spec,
                         const ModelSpec& model, const IntegratorConfig& cfg, const std::vector<int>& i_list);

struct PersistenceRow {
  double m = 0.0;
  double c_tilde = 0.0;
  double max_ratio = 0.0;  // max over checkpoints of |u(t)|_{H^m} / envelope
  bool pass = false;
};

/// |u(t)|_{H^m} <= |u0|_{H^m} exp(C int_0^t xi(1 + s) ds) with C fitted at the
/// first checkpoint and then frozen, at `checkpoints` uniform times up to
/// the horizon. Needs a 3D Euler model.
std::vector<PersistenceRow> regularity_persistence_check(const SpectralField& u0, const ModelSpec& model,
                                                          const std::vector<double>& m_list, double horizon,
                                                          const DissipationSpec& diss, const IntegratorConfig& cfg,
                                                          int checkpoints = 20);

}  // namespace imlab
