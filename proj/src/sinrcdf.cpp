#include "twr/sinrcdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twr {

CdfContext CdfContext::make(const Scenario& s, NodeId terminal) {
  if (terminal == NodeId::R) throw ValidationError("the relay has no receive SINR");
  const Scenario view = terminal == NodeId::T2 ? swap_roles(s) : s;
  validate_scenario(view);
  CdfContext c;
  c.g0 = view.gbar0();
  c.g1 = view.gbar1();
  c.g2 = view.gbar2();
  c.w2 = view.omega2();
  c.w1 = view.omega1();
  c.term = build_profile(view, NodeId::T1);
  c.relay = build_profile(view, NodeId::R);
  if (!c.term.active() || !c.relay.active())
    throw ValidationError(
        "analytic CDF tiers need active interference at the terminal and the relay; "
        "use the Monte Carlo estimators when a node is interference-free");
  c.lam1 = 1.0 / c.g1 + (c.w1 / c.w2) / c.g2;
  c.lam2 = 1.0 / c.g1 + ((c.w1 + 1.0) / c.w2) / c.g2;
  c.Phi1 = 1.0 / c.g0 - c.lam1;
  c.Phi2 = 1.0 / c.g0 - c.lam2;
  return c;
}

namespace {

struct SeriesStatus {
  bool diverged = false;   // expansion ratio left the unit disk
  bool exhausted = false;  // term budget ran out before the tail settled
  bool pole = false;       // rearrangement pole too close to the evaluation point
  int terms = 0;
};

int clamp_terms(int max_terms) { return std::clamp(max_terms, 1, 200); }

// Basis kernel: integral of s^l e^(-x s) over [0, 1].  Both branches are
// all-positive-term series, stable for any sign of x.
double p_basis(int l, double x) {
  if (x > 512.0) {
    // Deep-decay regime: the [0,1] integral equals l! / x^(l+1) up to a
    // remainder below 1e-80 here.
    return std::exp(std::lgamma(l + 1.0) - (l + 1.0) * std::log(x));
  }
  if (x >= 0.0) {
    double term = 1.0 / (l + 1.0);
    double sum = term;
    for (int n = 1; n < 4000; ++n) {
      term *= x / (l + 1.0 + n);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-x);
  }
  const double y = -x;
  double term = 1.0 / (l + 1.0);
  double sum = term;
  for (int m = 1; m < 4000; ++m) {
    term *= y / m * ((l + m) / (l + 1.0 + m));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// sum_l (-r)^l * p_basis(l, x), truncated once three consecutive terms drop
// below the relative tail tolerance.
double series_sum(double r, double x, const SeriesControl& ctl, SeriesStatus* st) {
  if (std::abs(r) >= 1.0 - 1e-12) {
    st->diverged = true;
    return 0.0;
  }
  const int cap = clamp_terms(ctl.max_terms);
  KahanSum s;
  double rpow = 1.0;
  int quiet = 0;
  int used = 0;
  for (int l = 0; l < cap; ++l) {
    const double term = rpow * p_basis(l, x);
    s.add(term);
    used = l + 1;
    if (std::abs(term) <= ctl.tail_tol * std::abs(s.value())) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
    rpow *= -r;
  }
  st->terms = std::max(st->terms, used);
  if (quiet < 3) st->exhausted = true;
  return s.value();
}

// Direct-branch factor: probability that the direct link alone carries the
// terminal past gamma, averaged over its interference.
double f1_direct(const CdfContext& c, double g) {
  KahanSum s;
  for (size_t j = 0; j < c.term.size(); ++j)
    s.add(c.term.phi[j] * c.g0 / (g + c.g0 / c.term.xi[j]));
  return std::exp(-g / c.g0) * s.value();
}

// Relayed-branch factor via the series expansion.  On any status flag the
// returned value is meaningless and the caller must re-route.
double f2_series(const CdfContext& c, double g, const SeriesControl& ctl, SeriesStatus* st) {
  const double x = c.Phi2 * g;
  // exp underflow further down would meet an overflowing series factor; the
  // whole term is below 1e-300 there, so cut it to zero as a pair.
  const double e_lam2 = c.lam2 * g > 700.0 ? 0.0 : std::exp(-c.lam2 * g);
  const double e_dir = std::exp(-g / c.g0);
  KahanSum total;
  for (size_t k = 0; k < c.relay.size(); ++k) {
    const double den_a = g / c.g2 + c.w2 / c.relay.xi[k];
    const double r_a = -(g / c.g2) / den_a;  // always in (-1, 0]
    const double s_a = e_lam2 > 0.0 ? series_sum(r_a, x, ctl, st) : 0.0;
    if (st->diverged || st->exhausted) return 0.0;
    for (size_t j = 0; j < c.term.size(); ++j) {
      const double xt = c.term.xi[j];
      const double bjk = c.beta(j, k);
      const double pole = g / c.g0 + bjk;
      if (std::abs(pole) < 1e-8 * (g / c.g0 + std::abs(bjk))) {
        st->pole = true;
        return 0.0;
      }
      const double inv1 = 1.0 / pole;
      const double inv2 = inv1 * inv1;
      double bracket = 0.0;
      if (e_lam2 > 0.0) {
        const double m_a = e_lam2 * (g / den_a) * s_a * (inv1 + inv2);
        const double den_b = c.lam1 * g + 1.0 / xt;
        const double r_b = c.Phi1 * g / den_b;
        const double s_b = series_sum(r_b, x, ctl, st);
        if (st->diverged || st->exhausted) return 0.0;
        const double m_b = e_lam2 * (g / den_b) * s_b * (inv1 / c.w2 + c.Phi1 * c.g2 * inv2);
        bracket += m_a + m_b;
      }
      bracket += c.g2 * inv1 *
                 (e_lam2 / (c.lam1 * g + 1.0 / xt) - e_dir / (g / c.g0 + 1.0 / xt));
      total.add(c.term.phi[j] * c.relay.phi[k] * bracket);
    }
  }
  return (c.w2 / c.g0) * total.value();
}

// Relayed-branch factor by direct quadrature of its defining 1-D integral.
// The decay prefactor is folded into the integrand so the exponent stays
// non-positive over the whole panel.
double f2_quad(const CdfContext& c, double g, const QuadratureSpec& qs, CdfDiagnostics* diag) {
  const auto integrand = [&c, g](double z) {
    double srelay = 0.0;
    for (size_t k = 0; k < c.relay.size(); ++k)
      srelay += c.relay.phi[k] / ((g - z) / (c.w2 * c.g2) + 1.0 / c.relay.xi[k]);
    double sterm = 0.0;
    for (size_t j = 0; j < c.term.size(); ++j) {
      const double q = c.Phi1 * z + c.lam1 * g + 1.0 / c.term.xi[j];
      sterm += c.term.phi[j] * (1.0 / q + 1.0 / (q * q));
    }
    return std::exp(-c.lam2 * g - c.Phi2 * z) * srelay * sterm;
  };
  const QuadratureResult r = integrate(integrand, 0.0, g, qs);
  diag->quad_error = std::max(diag->quad_error, r.error_estimate / c.g0);
  if (!r.converged) diag->converged = false;
  return r.value / c.g0;
}

AnalyticValue at_origin(CdfMethod method) {
  AnalyticValue out;
  out.method = method;
  return out;
}

}  // namespace

AnalyticValue cdf_quad_oracle(const CdfContext& c, double gamma, const QuadratureSpec& q) {
  if (gamma <= 0.0) return at_origin(CdfMethod::quad_oracle);
  AnalyticValue out;
  out.method = CdfMethod::quad_oracle;
  out.value = 1.0 - f1_direct(c, gamma) - f2_quad(c, gamma, q, &out.diag);
  return out;
}

AnalyticValue cdf_lower_bound(const CdfContext& c, double gamma, const SeriesControl& ctl) {
  if (gamma <= 0.0) return at_origin(CdfMethod::lower_bound);
  AnalyticValue out;
  out.method = CdfMethod::lower_bound;
  SeriesStatus st;
  const double f1 = f1_direct(c, gamma);
  const double f2 = f2_series(c, gamma, ctl, &st);
  out.diag.terms_used = st.terms;
  out.diag.series_diverged = st.diverged;
  bool trouble = st.diverged || st.exhausted || st.pole;
  if (!trouble) {
    out.value = 1.0 - f1 - f2;
    // A true CDF value: anything meaningfully outside [0, 1] means the
    // series rearrangement lost precision.
    trouble = !(out.value > -1e-6 && out.value < 1.0 + 1e-6);
  }
  if (trouble) {
    if (!ctl.oracle_fallback) {
      out.diag.converged = false;
      out.value = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    out.diag.used_fallback = true;
    out.value = 1.0 - f1 - f2_quad(c, gamma, {}, &out.diag);
  }
  return out;
}

AnalyticValue cdf_approx(const CdfContext& c, double gamma, const SeriesControl& ctl) {
  if (gamma <= 0.0) return at_origin(CdfMethod::approx);
  AnalyticValue out;
  out.method = CdfMethod::approx;
  const double g = gamma;
  const double x = c.Phi2 * g;
  const double e_lam2 = std::exp(-c.lam2 * g);
  const double e_dir = std::exp(-g / c.g0);
  // e^(-lam2 g) * g * (1 - e^(-x)) / x, written through the complementary
  // exponent lam2 + Phi2 = 1/g0 so neither factor can blow up; series form
  // near the removable x = 0 point.
  const double scaled_em = std::abs(x) < 1e-6
                               ? e_lam2 * g * (1.0 - 0.5 * x + x * x / 6.0)
                               : (e_lam2 - e_dir) / c.Phi2;
  KahanSum total;
  bool pole_trouble = false;
  for (size_t k = 0; k < c.relay.size() && !pole_trouble; ++k) {
    const double xr = c.relay.xi[k];
    for (size_t j = 0; j < c.term.size(); ++j) {
      const double xt = c.term.xi[j];
      const double bjk = c.beta(j, k);
      const double pole = g / c.g0 + bjk;
      if (std::abs(pole) < 1e-8 * (g / c.g0 + std::abs(bjk))) {
        pole_trouble = true;
        break;
      }
      const double inv1 = 1.0 / pole;
      const double inv2 = inv1 * inv1;
      const double mt_a = (inv1 + inv2) * scaled_em * xr / c.w2;
      const double mt_b =
          (inv1 / c.w2 + c.Phi1 * c.g2 * inv2) * scaled_em / (g / c.g0 + 1.0 / xt);
      const double lam_terms = c.g2 * inv1 *
          (e_lam2 / (c.lam1 * g + 1.0 / xt) - e_dir / (g / c.g0 + 1.0 / xt));
      total.add(c.term.phi[j] * c.relay.phi[k] * (mt_a + mt_b + lam_terms));
    }
  }
  if (pole_trouble) {
    if (!ctl.oracle_fallback) {
      out.diag.converged = false;
      out.value = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    out.diag.used_fallback = true;
    const AnalyticValue oracle = cdf_quad_oracle(c, gamma, {});
    out.value = oracle.value;
    out.diag.quad_error = oracle.diag.quad_error;
    out.diag.converged = oracle.diag.converged;
    return out;
  }
  out.value = 1.0 - f1_direct(c, g) - (c.w2 / c.g0) * total.value();
  return out;
}

double asymptotic_curvature(const CdfContext& c) {
  KahanSum relay_sq;  // weighted mean-square of the relay components
  for (size_t k = 0; k < c.relay.size(); ++k)
    relay_sq.add(c.relay.phi[k] * c.relay.xi[k] * c.relay.xi[k]);
  KahanSum term_lin;   // sum_j phi_j (xi_j + xi_j^2)
  KahanSum term_rate;  // sum_j phi_j (lam2 xi + (lam1+lam2) xi^2 + 2 lam1 xi^3)
  for (size_t j = 0; j < c.term.size(); ++j) {
    const double xt = c.term.xi[j];
    term_lin.add(c.term.phi[j] * (xt + xt * xt));
    term_rate.add(c.term.phi[j] *
                  (c.lam2 * xt + (c.lam1 + c.lam2) * xt * xt + 2.0 * c.lam1 * xt * xt * xt));
  }
  return (relay_sq.value() * term_lin.value() / (c.w2 * c.g2) + term_rate.value()) /
         (2.0 * c.g0);
}

double asymptotic_curvature_moments(const CdfContext& c) {
  const double b = c.term.mean_sq + 2.0 * c.term.mean + 1.0;
  const double cc = (c.relay.mean + 1.0) * (c.term.mean + 1.0);
  return ((c.w1 * b + cc) / (c.w2 * c.g2) + b / c.g1) / (2.0 * c.g0);
}

AnalyticValue cdf_asymptotic(const CdfContext& c, double gamma) {
  if (gamma <= 0.0) return at_origin(CdfMethod::asymptotic);
  AnalyticValue out;
  out.method = CdfMethod::asymptotic;
  const double k_raw = asymptotic_curvature(c);
  const double k_mom = asymptotic_curvature_moments(c);
  out.value = k_raw * gamma * gamma;
  out.diag.self_check = std::abs(k_raw - k_mom) / std::abs(k_mom);
  out.diag.asymptotic_strained = out.value > 0.1;
  return out;
}

AnalyticValue cdf_for_terminal(const Scenario& s, NodeId terminal, CdfMethod method,
                               double gamma, const SeriesControl& ctl) {
  const CdfContext c = CdfContext::make(s, terminal);
  switch (method) {
    case CdfMethod::lower_bound: return cdf_lower_bound(c, gamma, ctl);
    case CdfMethod::approx: return cdf_approx(c, gamma, ctl);
    case CdfMethod::asymptotic: return cdf_asymptotic(c, gamma);
    case CdfMethod::quad_oracle:
    default: return cdf_quad_oracle(c, gamma, {});
  }
}

}  // namespace twr
