#pragma once

#include <functional>
#include <vector>

namespace qtcap {

struct IntegrationResult {
  double value = 0.0;
  double abs_error = 0.0;  // estimated bound on |value - true|
  int evaluations = 0;
  bool converged = false;
};

// 15-point Kronrod rule with embedded 7-point Gauss rule on [a, b].
// The rule is open: the endpoints are never evaluated, so integrable
// endpoint singularities (log, weak power) are handled by refinement.
IntegrationResult gauss_kronrod_15(const std::function<double(double)>& f,
                                   double a, double b);

// Globally adaptive bisection, always refining the interval with the largest
// error estimate. Optional interior breakpoints seed the initial subdivision;
// put one at every known singularity or kink. Stops when the summed error
// estimate drops below max(abs_tol, rel_tol*|integral|) or the interval
// budget is exhausted (converged=false then, with the honest error bound).
IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b,
                                     double rel_tol, double abs_tol,
                                     int max_intervals,
                                     const std::vector<double>& breakpoints = {});

}  // namespace qtcap
