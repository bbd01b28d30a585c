#pragma once

#include <functional>

namespace gk {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  int evaluations = 0;
};

/// Adaptive Simpson on [a,b] split into `panels` initial panels; the absolute
/// tolerance is shared between panels.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int panels = 64, int max_depth = 48);

/// Fixed five-point Gauss-Legendre rule on [a,b].
double gauss5(const std::function<double(double)>& f, double a, double b);

}  // namespace gk
