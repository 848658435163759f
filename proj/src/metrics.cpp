#include "twr/metrics.hpp"

#include <cmath>

namespace twr {

namespace {

constexpr double kPi = 3.14159265358979323846;

void merge_diag(CdfDiagnostics* into, const CdfDiagnostics& from) {
  into->terms_used = std::max(into->terms_used, from.terms_used);
  into->series_diverged = into->series_diverged || from.series_diverged;
  into->used_fallback = into->used_fallback || from.used_fallback;
  into->converged = into->converged && from.converged;
  into->asymptotic_strained = into->asymptotic_strained || from.asymptotic_strained;
  into->quad_error = std::max(into->quad_error, from.quad_error);
  into->self_check = std::max(into->self_check, from.self_check);
}

// Per-terminal asymptotic curvature from interference moments only (valid
// for interference-free nodes as well, where the moments are zero).
double terminal_curvature(const Scenario& s, NodeId terminal) {
  const Scenario view = terminal == NodeId::T2 ? swap_roles(s) : s;
  double mt = 0, mt2 = 0, mr = 0, mr2 = 0;
  interference_moments(view.spec(NodeId::T1), view.power, &mt, &mt2);
  interference_moments(view.spec(NodeId::R), view.power, &mr, &mr2);
  const double b = mt2 + 2.0 * mt + 1.0;
  const double c = (mr + 1.0) * (mt + 1.0);
  return ((view.omega1() * b + c) / (view.omega2() * view.gbar2()) + b / view.gbar1()) /
         (2.0 * view.gbar0());
}

}  // namespace

double asymptotic_curvature_sum(const Scenario& s) {
  return terminal_curvature(s, NodeId::T1) + terminal_curvature(s, NodeId::T2);
}

double protocol_outage_asymptotic(const Scenario& s, double gamma_th) {
  if (gamma_th <= 0.0) return 0.0;
  return asymptotic_curvature_sum(s) * gamma_th * gamma_th;
}

AnalyticValue protocol_outage(const Scenario& s, double gamma_th, CdfMethod method,
                              const SeriesControl& ctl) {
  AnalyticValue out;
  out.method = method;
  if (method == CdfMethod::asymptotic) {
    out.value = protocol_outage_asymptotic(s, gamma_th);
    out.diag.asymptotic_strained = out.value > 0.1;
    return out;
  }
  const AnalyticValue f1 = cdf_for_terminal(s, NodeId::T1, method, gamma_th, ctl);
  const AnalyticValue f2 = cdf_for_terminal(s, NodeId::T2, method, gamma_th, ctl);
  merge_diag(&out.diag, f1.diag);
  merge_diag(&out.diag, f2.diag);
  out.value = f1.value + f2.value - f1.value * f2.value;
  return out;
}

double sum_ber_asymptotic(const Scenario& s, ModulationConstants mod) {
  return mod.a * gamma_fn(2.5) / (std::sqrt(kPi) * mod.b * mod.b) *
         asymptotic_curvature_sum(s);
}

AnalyticValue sum_ber(const Scenario& s, ModulationConstants mod, CdfMethod method,
                      const SeriesControl& ctl) {
  AnalyticValue out;
  out.method = method;
  if (method == CdfMethod::asymptotic) {
    out.value = sum_ber_asymptotic(s, mod);
    return out;
  }
  // Beyond u_max the Gaussian factor is below 1e-16, so the truncated tail
  // is negligible against every tolerance used downstream.
  const double u_max = std::sqrt(37.0 / mod.b);
  QuadratureSpec q;
  q.abs_tol = 1e-12;
  q.rel_tol = 1e-9;
  q.max_subdivisions = 4000;
  double total = 0.0;
  for (NodeId t : {NodeId::T1, NodeId::T2}) {
    const CdfContext c = CdfContext::make(s, t);
    CdfDiagnostics leg_diag;
    const auto integrand = [&](double u) {
      const double gamma = u * u;
      AnalyticValue f;
      switch (method) {
        case CdfMethod::lower_bound: f = cdf_lower_bound(c, gamma, ctl); break;
        case CdfMethod::approx: f = cdf_approx(c, gamma, ctl); break;
        default: f = cdf_quad_oracle(c, gamma, {}); break;
      }
      merge_diag(&leg_diag, f.diag);
      return f.value * std::exp(-mod.b * gamma);
    };
    const QuadratureResult r = integrate(integrand, 0.0, u_max, q);
    if (!r.converged) leg_diag.converged = false;
    leg_diag.quad_error = std::max(leg_diag.quad_error, r.error_estimate);
    merge_diag(&out.diag, leg_diag);
    total += 2.0 * mod.a * std::sqrt(mod.b / kPi) * r.value;
  }
  out.value = total;
  return out;
}

AnalyticValue ergodic_sum_rate(const Scenario& s, const QuadratureSpec& q,
                               const SeriesControl& ctl) {
  AnalyticValue out;
  out.method = CdfMethod::approx;
  double total = 0.0;
  for (NodeId t : {NodeId::T1, NodeId::T2}) {
    const CdfContext c = CdfContext::make(s, t);
    CdfDiagnostics leg_diag;
    // Scan for the point where the complementary CDF is numerically spent,
    // then integrate only up to it.
    double hi = std::max(c.g0, 1.0);
    for (int step = 0; step < 80; ++step) {
      if (1.0 - cdf_approx(c, hi, ctl).value <= 1e-12) break;
      hi *= 2.0;
    }
    const auto integrand = [&](double gamma) {
      const AnalyticValue f = cdf_approx(c, gamma, ctl);
      merge_diag(&leg_diag, f.diag);
      const double tail = std::max(1.0 - f.value, 0.0);
      return tail / (1.0 + gamma);
    };
    const QuadratureResult r = integrate(integrand, 0.0, hi, q);
    if (!r.converged) leg_diag.converged = false;
    leg_diag.quad_error = std::max(leg_diag.quad_error, r.error_estimate);
    merge_diag(&out.diag, leg_diag);
    total += r.value / (3.0 * std::log(2.0));
  }
  out.value = total;
  return out;
}

OptimCoefficients optim_coefficients(const Scenario& s) {
  OptimCoefficients oc;
  double mt = 0, mt2 = 0, mr = 0, mr2 = 0;
  interference_moments(s.spec(NodeId::T1), s.power, &mt, &mt2);
  interference_moments(s.spec(NodeId::R), s.power, &mr, &mr2);
  oc.b1 = mt2 + 2.0 * mt + 1.0;
  oc.c1 = (mr + 1.0) * (mt + 1.0);
  double nt = 0, nt2 = 0;
  interference_moments(s.spec(NodeId::T2), s.power, &nt, &nt2);
  oc.b2 = nt2 + 2.0 * nt + 1.0;
  oc.c2 = (mr + 1.0) * (nt + 1.0);
  return oc;
}

}  // namespace twr
