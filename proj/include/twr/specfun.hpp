// Numerical primitives: compensated summation, gamma-family special
// functions, and an adaptive Gauss-Kronrod 7/15 quadrature with the
// semi-infinite transforms the analytic evaluators need.
#pragma once

#include <functional>

namespace twr {

// Kahan compensated accumulator for alternating / cancellation-prone sums.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Gamma(x) for x > 0.
double gamma_fn(double x);

// Lower incomplete gamma: integral of t^(a-1) e^-t over [0, x], a > 0, x >= 0.
// Series expansion below the a+1 crossover, Lentz continued fraction above.
double lower_inc_gamma(double a, double x);

// Complementary error function.
double erfc(double x);

// How integrate_semi_infinite maps [0, inf) onto finite panels.
enum class QuadTransform {
  none,         // direct panel doubling: [0,1], [1,2], [2,4], ...
  exp_tail,     // u = e^-x, for integrands with an exponential tail
  sqrt_origin,  // x = u^2, for integrands with an x^(-1/2) origin singularity
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;  // >= 16
  QuadTransform transform = QuadTransform::none;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 on the finite interval [lo, hi]; worst-panel
// refinement until the global error estimate meets
// max(abs_tol, rel_tol * |value|) or the panel budget runs out.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureSpec& spec = {});

// Integral of f over [0, inf) using the transform selected in `spec`.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const QuadratureSpec& spec = {});

}  // namespace twr
