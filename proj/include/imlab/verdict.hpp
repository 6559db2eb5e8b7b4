#pragma once

#include <string>

namespace imlab {

enum class Status { Pass, Fail, Inconclusive };

std::string to_string(Status s);

/// One gated check. `paper_ref` names the identity or plumbing rule the check
/// comes from so every number in a report can be traced back.
struct Verdict {
  std::string check;
  std::string paper_ref;
  double target = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  /// Allowed |estimate - target| (already combining the sigma gate and caps).
  double tolerance = 0.0;
  Status status = Status::Inconclusive;
  std::string detail;

  bool passed() const { return status == Status::Pass; }
  /// |estimate - target| / std_error, 0 when both vanish.
  double z_score() const;
};

/// Pass iff |estimate - target| <= sigmas * stderr and <= rel_cap * |target|
/// (the relative cap is replaced by abs_floor when the target is 0).
Verdict gate(std::string check, std::string ref, double target, double estimate, double std_error,
             double sigmas = 3.0, double rel_cap = 0.1, double abs_floor = 1e-12);

}  // namespace imlab
