// System-level performance metrics built on the per-terminal SINR CDF:
// protocol outage, average sum BER, and ergodic sum rate, each in the
// analytic tiers the CDF supports plus the closed-form asymptotic tier.
#pragma once

#include "twr/sinrcdf.hpp"

namespace twr {

// Coefficients of the erfc-based conditional error kernel
// a * erfc(sqrt(b * sinr)).
struct ModulationConstants {
  double a = 0.5;
  double b = 1.0;
};
inline constexpr ModulationConstants kBpsk{0.5, 1.0};
inline constexpr ModulationConstants kQpsk{0.5, 0.5};

// Outage of the three-phase exchange: the event that either terminal's SINR
// falls below gamma_th, combined from the two per-terminal CDFs as
// F1 + F2 - F1*F2.  The asymptotic method keeps only the leading sum (the
// product is higher order there).
AnalyticValue protocol_outage(const Scenario& s, double gamma_th, CdfMethod method,
                              const SeriesControl& ctl = {});

// Sum over both terminals of the asymptotic quadratic CDF coefficient:
// F_1 + F_2 ~ curvature_sum * gamma^2 for small gamma.  Moment-based, so it
// also accepts interference-free nodes.
double asymptotic_curvature_sum(const Scenario& s);
double protocol_outage_asymptotic(const Scenario& s, double gamma_th);

// Average sum BER: for each terminal, a*sqrt(b/pi) * integral of
// F(gamma) e^(-b gamma) / sqrt(gamma), evaluated after the variance-
// stabilizing substitution gamma = u^2.
AnalyticValue sum_ber(const Scenario& s, ModulationConstants mod, CdfMethod method,
                      const SeriesControl& ctl = {});
// Closed high-SNR form: a * Gamma(5/2) / (sqrt(pi) b^2) * curvature_sum.
double sum_ber_asymptotic(const Scenario& s, ModulationConstants mod);

// Ergodic sum rate (1/3 pre-log per terminal) using the approx CDF tier:
// sum over terminals of integral of (1 - F(gamma)) / (1 + gamma) / (3 ln 2).
AnalyticValue ergodic_sum_rate(const Scenario& s, const QuadratureSpec& q = {},
                               const SeriesControl& ctl = {});

// Interference-moment coefficients the placement/power-split optimizer
// consumes; b_i couples to terminal i's own links, c_i to the relay.
struct OptimCoefficients {
  double b1 = 1, c1 = 1, b2 = 1, c2 = 1;
};
OptimCoefficients optim_coefficients(const Scenario& s);

}  // namespace twr
