#include "imlab/verdict.hpp"

#include <cmath>
#include <sstream>

namespace imlab {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

double Verdict::z_score() const {
  const double diff = std::abs(estimate - target);
  if (diff == 0.0) return 0.0;
  return std_error > 0.0 ? diff / std_error : INFINITY;
}

Verdict gate(std::string check, std::string ref, double target, double estimate, double std_error, double sigmas,
             double rel_cap, double abs_floor) {
  Verdict v;
  v.check = std::move(check);
  v.paper_ref = std::move(ref);
  v.target = target;
  v.estimate = estimate;
  v.std_error = std_error;
  const double sigma_tol = sigmas * std_error + abs_floor;
  const double rel_tol = target != 0.0 ? rel_cap * std::abs(target) + abs_floor : abs_floor;
  v.tolerance = std::min(sigma_tol, rel_tol);
  const double diff = std::abs(estimate - target);
  v.status = std::isfinite(estimate) && diff <= sigma_tol && diff <= rel_tol ? Status::Pass : Status::Fail;
  std::ostringstream d;
  d << "|diff| = " << diff << ", " << sigmas << " sigma = " << sigma_tol << ", relative cap = " << rel_tol;
  v.detail = d.str();
  return v;
}

}  // namespace imlab
