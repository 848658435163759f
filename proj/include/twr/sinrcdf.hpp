// Analytic CDF of a terminal's receive SINR bound under hyper-exponential
// co-channel interference, in four tiers:
//
//   lower_bound  -- closed-form CDF of the min-of-hops SINR bound (a lower
//                   bound on the exact-SINR outage), evaluated through a
//                   power-series expansion of its inner integrals.
//   approx       -- cheaper high-SNR approximation of the same CDF.
//   asymptotic   -- leading quadratic term, valid in the deep high-SNR /
//                   small-gamma regime.
//   quad_oracle  -- the same lower_bound CDF evaluated by direct adaptive
//                   quadrature of its defining one-dimensional integral;
//                   slower, assumption-free, used as the reference and as
//                   the fallback when the series leaves its convergence
//                   region.
#pragma once

#include <cstddef>

#include "twr/scenario.hpp"
#include "twr/specfun.hpp"

namespace twr {

enum class CdfMethod { lower_bound, approx, asymptotic, quad_oracle };

struct SeriesControl {
  double tail_tol = 1e-10;  // relative tail threshold for series truncation
  int max_terms = 200;      // hard cap on series depth (values > 200 are clamped)
  bool oracle_fallback = true;  // divergence / near-pole -> quadrature route
};

struct CdfDiagnostics {
  int terms_used = 0;            // deepest series index consumed
  bool series_diverged = false;  // expansion left its convergence region
  bool used_fallback = false;    // value came from the quadrature route
  bool converged = true;         // false: value is unreliable (NaN)
  bool asymptotic_strained = false;  // asymptotic tier above its validity range
  double quad_error = 0.0;           // quadrature error estimate, when used
  double self_check = 0.0;           // asymptotic tier: raw vs moment form gap
};

struct AnalyticValue {
  double value = 0.0;
  CdfMethod method = CdfMethod::lower_bound;
  CdfDiagnostics diag;
};

// Role-normalized per-terminal view of a scenario plus the derived series
// constants.  For terminal 2 the scenario is mirrored first, so the same
// formulas serve both terminals.
struct CdfContext {
  double g0 = 1;  // mean SNR, direct link
  double g1 = 1;  // mean SNR, relay -> this terminal broadcast hop
  double g2 = 1;  // mean SNR, partner -> relay hop
  double w2 = 0.5;  // relay power fraction forwarding the partner's signal here
  double w1 = 0.5;  // complementary fraction
  InterferenceProfile term;   // interference at this terminal
  InterferenceProfile relay;  // interference at the relay

  // Exponential decay rates of the two inner integral kernels and their
  // complements against the direct link (Phi_i = 1/g0 - lam_i).
  double lam1 = 0, lam2 = 0, Phi1 = 0, Phi2 = 0;

  double beta(size_t j, size_t k) const {
    return w2 * g2 * Phi1 / relay.xi[k] + 1.0 / term.xi[j];
  }

  // Throws ValidationError when the terminal or relay has no interference
  // (the hyper-exponential machinery needs at least one active component).
  static CdfContext make(const Scenario& s, NodeId terminal);
};

AnalyticValue cdf_lower_bound(const CdfContext& c, double gamma, const SeriesControl& ctl = {});
AnalyticValue cdf_approx(const CdfContext& c, double gamma, const SeriesControl& ctl = {});
AnalyticValue cdf_asymptotic(const CdfContext& c, double gamma);
AnalyticValue cdf_quad_oracle(const CdfContext& c, double gamma, const QuadratureSpec& q = {});

// Convenience wrapper: build the context for `terminal` and evaluate.
AnalyticValue cdf_for_terminal(const Scenario& s, NodeId terminal, CdfMethod method,
                               double gamma, const SeriesControl& ctl = {});

// Quadratic coefficient K of the asymptotic tier, F(gamma) ~ K * gamma^2,
// in its raw partial-fraction form and via the interference-moment
// identities; the two must agree to rounding and are cross-checked at
// every asymptotic evaluation.
double asymptotic_curvature(const CdfContext& c);
double asymptotic_curvature_moments(const CdfContext& c);

}  // namespace twr
