#include "recalnet/gradcheck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace recalnet {

GradCheckReport grad_check(const ScalarFn& f, std::vector<Tensor> params,
                           const std::vector<Tensor>& analytic, double step, double tol,
                           double zero_floor) {
  if (params.size() != analytic.size()) {
    throw std::invalid_argument("grad_check: " + std::to_string(params.size()) + " params vs " +
                                std::to_string(analytic.size()) + " analytic gradients");
  }
  if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
  if (zero_floor < 0.0) throw std::invalid_argument("grad_check: zero_floor must be nonnegative");

  GradCheckReport report;
  report.step = step;
  report.per_param_error.assign(params.size(), 0.0);

  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!params[p].same_shape(analytic[p])) {
      throw std::invalid_argument("grad_check: param " + std::to_string(p) + " shape " +
                                  shape_str(params[p]) + " vs gradient " + shape_str(analytic[p]));
    }
    for (std::size_t i = 0; i < params[p].data.size(); ++i) {
      double original = params[p].data[i];
      params[p].data[i] = original + step;
      double f_plus = f(params);
      params[p].data[i] = original - step;
      double f_minus = f(params);
      params[p].data[i] = original;

      double numeric = (f_plus - f_minus) / (2.0 * step);
      double a = analytic[p].data[i];
      // Both sides below the floor: the coordinate is a numerical zero on
      // both oracles, where a relative comparison only measures roundoff.
      if (std::fabs(a) <= zero_floor && std::fabs(numeric) <= zero_floor) continue;
      double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-12});
      double rel = std::fabs(a - numeric) / denom;
      report.per_param_error[p] = std::max(report.per_param_error[p], rel);
      report.max_rel_error = std::max(report.max_rel_error, rel);
    }
  }

  report.pass = report.max_rel_error <= tol;
  return report;
}

}  // namespace recalnet
