#include "twr/optimizer.hpp"

#include <cmath>
#include <limits>

#include "twr/mutation.hpp"

namespace twr {

namespace {

double hop_gain_1(const Scenario& s, double d) { return s.power * std::pow(1.0 - d, -s.v); }
double hop_gain_2(const Scenario& s, double d) { return s.power * std::pow(d, -s.v); }

double objective_from(const OptimCoefficients& oc, const Scenario& s, double omega, double d) {
  const double g1 = hop_gain_1(s, d);
  const double g2 = hop_gain_2(s, d);
  return (oc.b2 - oc.b1) / g2 + (oc.b1 + oc.c1) / (omega * g2) +
         (oc.b1 - oc.b2) / g1 + (oc.b2 + oc.c2) / ((1.0 - omega) * g1);
}

double omega_from(const OptimCoefficients& oc, const Scenario& s, double d) {
  const double g1 = hop_gain_1(s, d);
  const double g2 = hop_gain_2(s, d);
  double s1, s2;
  if (active_mutation() == Mutation::swap_coefficient_roles) {
    s1 = std::sqrt((oc.b2 + oc.c2) * g1);
    s2 = std::sqrt((oc.b1 + oc.c1) * g2);
  } else {
    s1 = std::sqrt((oc.b1 + oc.c1) * g1);
    s2 = std::sqrt((oc.b2 + oc.c2) * g2);
  }
  return s1 / (s1 + s2);
}

}  // namespace

double placement_objective(const Scenario& s, double omega, double d) {
  return objective_from(optim_coefficients(s), s, omega, d);
}

double optimal_omega(const Scenario& s, double d) {
  return omega_from(optim_coefficients(s), s, d);
}

double optimal_location_from_coefficients(const OptimCoefficients& oc, double omega, double v) {
  const double num = omega * (1.0 - omega) * (oc.b2 - oc.b1) + (1.0 - omega) * (oc.b1 + oc.c1);
  const double den = omega * (1.0 - omega) * (oc.b1 - oc.b2) + omega * (oc.b2 + oc.c2);
  if (!(num > 0.0) || !(den > 0.0))
    throw DegenerateRatioError("location update has no positive coefficient ratio");
  const double ratio = num / den;
  return 1.0 / (std::pow(ratio, 1.0 / (v - 1.0)) + 1.0);
}

double optimal_location(const Scenario& s, double omega) {
  return optimal_location_from_coefficients(optim_coefficients(s), omega, s.v);
}

OptResult joint_optimize(const Scenario& s, int max_iter, bool grid_fallback) {
  validate_scenario(s);
  if (max_iter < 1) throw ValidationError("joint optimization needs max_iter >= 1");
  const OptimCoefficients oc = optim_coefficients(s);
  OptResult res;
  double omega = s.omega;
  double d = 0.5;
  res.trace.push_back(objective_from(oc, s, omega, d));
  for (int it = 0; it < max_iter; ++it) {
    omega = omega_from(oc, s, d);
    try {
      d = optimal_location_from_coefficients(oc, omega, s.v);
    } catch (const DegenerateRatioError&) {
      if (!grid_fallback) throw;
      // Fine scan over the location at the current split.
      constexpr int kRes = 1000;
      double best = std::numeric_limits<double>::infinity();
      double best_d = d;
      for (int j = 1; j < kRes; ++j) {
        const double dj = static_cast<double>(j) / kRes;
        const double val = objective_from(oc, s, omega, dj);
        if (val < best) {
          best = val;
          best_d = dj;
        }
      }
      d = best_d;
    }
    res.trace.push_back(objective_from(oc, s, omega, d));
  }
  res.omega = omega;
  res.d = d;
  res.objective = res.trace.back();
  res.iterations = max_iter;
  return res;
}

OptResult grid_search(const Scenario& s, int resolution) {
  validate_scenario(s);
  if (resolution < 2) throw ValidationError("grid resolution must be >= 2");
  const OptimCoefficients oc = optim_coefficients(s);
  OptResult res;
  double best = std::numeric_limits<double>::infinity();
  // Ascending scans with a strict improvement test: the first of any set of
  // tied minima -- the lexicographically smallest (omega, d) -- wins.
  for (int i = 1; i < resolution; ++i) {
    const double omega = static_cast<double>(i) / resolution;
    for (int j = 1; j < resolution; ++j) {
      const double d = static_cast<double>(j) / resolution;
      const double val = objective_from(oc, s, omega, d);
      if (val < best) {
        best = val;
        res.omega = omega;
        res.d = d;
      }
    }
  }
  res.objective = best;
  res.iterations = 0;
  res.trace = {best};
  return res;
}

}  // namespace twr
