#include <cmath>

#include "imlab/errors.hpp"
#include "imlab/integrator.hpp"
#include "imlab/statistics.hpp"

namespace imlab {

BalanceFunction BalanceFunction::identity() {
  return {"x", [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

BalanceFunction BalanceFunction::power(int p) {
  if (p < 0) throw DomainError("balance power must be >= 0");
  const double dp = p;
  return {"x^" + std::to_string(p), [dp](double x) { return std::pow(x, dp); },
          [dp](double x) { return dp == 0.0 ? 0.0 : dp * std::pow(x, dp - 1.0); },
          [dp](double x) { return dp < 2.0 ? 0.0 : dp * (dp - 1.0) * std::pow(x, dp - 2.0); }};
}

BalanceFunction BalanceFunction::constant(double c) {
  return {"const", [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

BalanceSeries ito_balance_residual(const BalanceFunction& F, const std::vector<TrajectoryRecord>& ensemble,
                                   double alpha, double A0N, bool control_variate) {
  BalanceSeries out;
  if (ensemble.empty()) throw DataError("balance residual needs at least one path");
  const std::string key = "bal/" + F.name + "/";
  const std::size_t len = ensemble.front().times.size();
  for (const auto& rec : ensemble) {
    if (rec.times != ensemble.front().times) throw DataError("paths in the ensemble use different time grids");
    for (const char* part : {"F", "F1G", "F1", "F2Q", "F1M"}) {
      if (rec.at(key + part).size() != len) throw DataError("balance series '" + key + part + "' is incomplete");
    }
  }
  out.t = ensemble.front().times;
  out.paths = static_cast<int>(ensemble.size());
  for (std::size_t k = 0; k < len; ++k) {
    RunningStats residual, jump, diss, inject, ito;
    for (const auto& rec : ensemble) {
      const double dF = rec.at(key + "F")[k] - rec.at(key + "F")[0];
      const double d = 2.0 * alpha * rec.at(key + "F1G")[k];
      const double in = alpha * A0N * rec.at(key + "F1")[k];
      const double c = 2.0 * alpha * rec.at(key + "F2Q")[k];
      const double m = control_variate ? rec.at(key + "F1M")[k] : 0.0;
      residual.push(dF + d - in - c - m);
      jump.push(dF);
      diss.push(d);
      inject.push(in);
      ito.push(c);
    }
    out.mean.push_back(residual.mean());
    out.std_error.push_back(residual.stderr_of_mean());
    out.scale.push_back(std::max({std::abs(jump.mean()), std::abs(diss.mean()), std::abs(inject.mean()),
                                  std::abs(ito.mean())}));
  }
  return out;
}

}  // namespace imlab
