// Relay power-split and placement optimization against the asymptotic
// outage objective, which factorizes into interference-moment coefficients
// times simple functions of (omega, d) and admits closed-form coordinate
// updates.
#pragma once

#include <vector>

#include "twr/metrics.hpp"

namespace twr {

struct OptResult {
  double omega = 0.5;
  double d = 0.5;
  double objective = 0.0;
  int iterations = 0;
  // Objective value at the starting point, then after each full
  // (omega, d) update; nonincreasing by construction.
  std::vector<double> trace;
};

// The minimized quantity: the asymptotic outage coefficient with the
// threshold- and direct-link-dependent prefactor stripped off (it does not
// depend on omega or d).  Equal to 2 * gbar0 * asymptotic_curvature_sum of
// the scenario re-posed at (omega, d).
double placement_objective(const Scenario& s, double omega, double d);

// Closed-form minimizer over the power split at a fixed relay location.
double optimal_omega(const Scenario& s, double d);

// Closed-form minimizer over the relay location at a fixed power split.
// Throws DegenerateRatioError when the update's coefficient ratio has no
// positive root (impossible for moment-derived coefficients, which are all
// >= 1; the guard protects direct low-level use).
double optimal_location(const Scenario& s, double omega);
double optimal_location_from_coefficients(const OptimCoefficients& oc, double omega, double v);

// Alternating minimization starting from d = 0.5 and the scenario's own
// omega: exactly max_iter rounds of omega update followed by location
// update.  With grid_fallback, a degenerate location update is replaced by
// a fine scan over d instead of throwing.
OptResult joint_optimize(const Scenario& s, int max_iter = 3, bool grid_fallback = false);

// Exhaustive scan over the interior grid points i/resolution,
// i = 1 .. resolution-1, in both coordinates; ties resolve to the
// lexicographically smallest (omega, d).
OptResult grid_search(const Scenario& s, int resolution = 200);

}  // namespace twr
