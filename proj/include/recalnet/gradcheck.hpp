#pragma once

#include <functional>
#include <vector>

#include "recalnet/tensor.hpp"

namespace recalnet {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double step = 0.0;
  bool pass = false;
  /// Worst relative error inside each parameter tensor, index-aligned
  /// with the params argument.
  std::vector<double> per_param_error;
};

using ScalarFn = std::function<double(const std::vector<Tensor>&)>;

/// Central-difference check of analytic gradients: every coordinate of
/// every parameter is perturbed by +/-step and (f+ - f-)/(2 step) is
/// compared against the matching analytic entry with relative error
/// |a - n| / max(|a|, |n|, 1e-12).
///
/// zero_floor > 0 skips coordinates where BOTH |analytic| and |numeric|
/// fall at or below the floor. Some losses are exactly flat along certain
/// parameters (a bias on attention keys shifts every score in a softmax
/// row by the same constant, so it cancels); there the true gradient is
/// zero, the central difference reads pure rounding noise of order
/// eps/step, and a relative comparison of the two numerical zeros is
/// meaningless. The default 0.0 disables the floor.
GradCheckReport grad_check(const ScalarFn& f, std::vector<Tensor> params,
                           const std::vector<Tensor>& analytic, double step = 1e-4,
                           double tol = 1e-5, double zero_floor = 0.0);

}  // namespace recalnet
