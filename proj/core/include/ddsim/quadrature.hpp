#pragma once

#include <functional>

namespace ddsim::quadrature {

struct Result {
  double value = 0;
  double error = 0;  // estimated absolute error
  int evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]: bisects the interval with the
/// largest error estimate until |error| <= max(abs_tol, rel_tol*|value|) or
/// max_intervals is reached.
Result integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 0.0,
                          int max_intervals = 4000);

}  // namespace ddsim::quadrature
