// System metrics: protocol outage, sum BER, ergodic sum rate, their
// asymptotic closed forms, and the optimizer coefficient extraction.
#include <doctest.h>

#include <cmath>

#include "twr/mcsim.hpp"
#include "twr/metrics.hpp"
#include "twr/scenario.hpp"
#include "twr/specfun.hpp"
#include "twr/sweep.hpp"

using namespace twr;

namespace {

Scenario preset(const char* name) {
  return parse_scenario_json(find_preset(name)->scenario_json);
}

Scenario at_power(const char* name, double p_db) {
  Scenario s = preset(name);
  s.power = std::pow(10.0, p_db / 10.0);
  return s;
}

constexpr uint64_t kSeed = 20260822;
constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("protocol outage combines the two per-terminal CDFs") {
  const Scenario s = preset("fig3");
  const double gth = 7.0;
  for (CdfMethod m : {CdfMethod::lower_bound, CdfMethod::approx, CdfMethod::quad_oracle}) {
    const double f1 = cdf_for_terminal(s, NodeId::T1, m, gth).value;
    const double f2 = cdf_for_terminal(s, NodeId::T2, m, gth).value;
    const AnalyticValue pro = protocol_outage(s, gth, m);
    CHECK(pro.value == doctest::Approx(f1 + f2 - f1 * f2).epsilon(1e-12));
  }
  // asymptotic method keeps only the leading sum
  CHECK(protocol_outage(s, gth, CdfMethod::asymptotic).value ==
        doctest::Approx(protocol_outage_asymptotic(s, gth)).epsilon(1e-14));
}

TEST_CASE("protocol outage is a probability, nondecreasing in the threshold") {
  const Scenario s = preset("fig3");
  double prev = -1.0;
  for (double gth : {1.0, 4.0, 7.0, 12.0}) {
    const double p = protocol_outage(s, gth, CdfMethod::lower_bound).value;
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("pinned protocol outage on the two-interferer preset") {
  const Scenario s = preset("fig3");
  CHECK(protocol_outage(s, 7.0, CdfMethod::lower_bound).value ==
        doctest::Approx(0.010893623343072744).epsilon(1e-10));
}

TEST_CASE("outage bound is consistent with the simulator") {
  const Scenario s = at_power("fig3", 15.0);
  const double gth = 7.0;
  const MetricEstimate mc =
      estimate_outage(s, gth, OutageKind::protocol, SinrKind::min_bound, 200000, kSeed);
  const double lb = protocol_outage(s, gth, CdfMethod::lower_bound).value;
  CHECK(std::abs(mc.mean - lb) <= 3.0 * mc.std_err);
  // and it lower-bounds the exact-SINR outage
  const MetricEstimate exact =
      estimate_outage(s, gth, OutageKind::protocol, SinrKind::exact, 200000, kSeed);
  CHECK(lb <= exact.mean + 3.0 * exact.std_err);
}

TEST_CASE("lower-bound outage stays under the approximate tier at low SNR") {
  const Scenario s = at_power("fig3", 0.0);
  for (double g : {0.1, 0.3, 1.0, 3.0, 5.0}) {
    const double lb = protocol_outage(s, g, CdfMethod::lower_bound).value;
    const double app = protocol_outage(s, g, CdfMethod::approx).value;
    CHECK(lb <= app + 5e-3);
  }
}

TEST_CASE("asymptotic BER and outage share the curvature constant") {
  const Scenario s = preset("fig4");
  // For the erfc kernel with a = 1/2, b = 1 and threshold 7:
  //   ber_asy / outage_asy = [a Gamma(5/2) / (sqrt(pi) b^2)] / gamma_th^2 = 3/392.
  const double ratio = sum_ber_asymptotic(s, kBpsk) / protocol_outage_asymptotic(s, 7.0);
  CHECK(ratio == doctest::Approx(3.0 / 392.0).epsilon(1e-12));
  // threshold dependence is exactly quadratic
  CHECK(protocol_outage_asymptotic(s, 3.0) / protocol_outage_asymptotic(s, 7.0) ==
        doctest::Approx(9.0 / 49.0).epsilon(1e-12));
  // curvature sum ties the two closed forms together
  const double k = asymptotic_curvature_sum(s);
  CHECK(protocol_outage_asymptotic(s, 7.0) == doctest::Approx(k * 49.0).epsilon(1e-13));
  CHECK(sum_ber_asymptotic(s, kBpsk) ==
        doctest::Approx(0.5 * gamma_fn(2.5) / std::sqrt(kPi) * k).epsilon(1e-13));
}

TEST_CASE("asymptotic coefficient scales as the inverse square of the power") {
  // Freeze the interferer powers at their preset values so only the
  // transmit power scales; the coefficient must then fall exactly as P^-2.
  Scenario base = preset("fig3");
  for (NodeId n : {NodeId::T1, NodeId::T2, NodeId::R}) {
    InterfererSpec& spec = base.spec(n);
    spec.power = spec.resolved_power(base.power);
    spec.power_ratio = 0.0;
  }
  double ref = 0.0;
  for (double p_db : {150.0, 170.0, 190.0}) {
    Scenario s = base;
    s.power = std::pow(10.0, p_db / 10.0);
    const double val = protocol_outage_asymptotic(s, 1.0) * s.power * s.power;
    if (ref == 0.0)
      ref = val;
    else
      CHECK(val == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("ratio-specified interference destroys diversity: the asymptote floors") {
  // When interferer powers are tied to the transmit power by a fixed ratio,
  // interference grows with the signal and the asymptotic outage no longer
  // decays with power at all -- it is power-invariant.
  const Scenario base = preset("fig3");
  double ref = 0.0;
  for (double p_db : {150.0, 170.0, 190.0}) {
    Scenario s = base;
    s.power = std::pow(10.0, p_db / 10.0);
    const double val = protocol_outage_asymptotic(s, 1.0);
    if (ref == 0.0)
      ref = val;
    else
      CHECK(val == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("pinned sum-BER values and simulator agreement") {
  const Scenario s = at_power("fig4", 25.0);
  const AnalyticValue lb = sum_ber(s, kBpsk, CdfMethod::lower_bound);
  const AnalyticValue app = sum_ber(s, kBpsk, CdfMethod::approx);
  CHECK(lb.value == doctest::Approx(0.00018590608353439216).epsilon(1e-10));
  CHECK(app.value == doctest::Approx(0.00022904777615791058).epsilon(1e-10));
  CHECK(lb.diag.converged);

  const MetricEstimate mc = estimate_sum_ber(s, 0.5, 1.0, SinrKind::min_bound, 200000, kSeed);
  CHECK(std::abs(mc.mean - lb.value) <= 3.0 * mc.std_err);
}

TEST_CASE("BER integral normalization: a unit CDF gives exactly a") {
  // integral over gamma of a sqrt(b/pi) e^{-b gamma} / sqrt(gamma) = a,
  // the weight the BER evaluator applies to the CDF.
  for (double b : {1.0, 0.5}) {
    QuadratureSpec q;
    q.transform = QuadTransform::sqrt_origin;
    const double a = 0.5;
    const double val = integrate_semi_infinite(
                           [a, b](double g) {
                             return a * std::sqrt(b / kPi) * std::exp(-b * g) / std::sqrt(g);
                           },
                           q)
                           .value;
    CHECK(val == doctest::Approx(a).epsilon(1e-9));
  }
}

TEST_CASE("pinned ergodic sum rate and monotone growth in power") {
  const Scenario s20 = at_power("fig5", 20.0);
  const AnalyticValue r20 = ergodic_sum_rate(s20);
  CHECK(r20.diag.converged);
  CHECK(r20.value == doctest::Approx(4.9558478755869224).epsilon(1e-10));

  const double r10 = ergodic_sum_rate(at_power("fig5", 10.0)).value;
  const double r30 = ergodic_sum_rate(at_power("fig5", 30.0)).value;
  CHECK(r10 < r20.value);
  CHECK(r20.value < r30);
  CHECK(r10 > 0.0);
}

TEST_CASE("analytic rate tracks the simulator") {
  const Scenario s = at_power("fig5", 10.0);
  const double app = ergodic_sum_rate(s).value;
  const MetricEstimate mc = estimate_sum_rate(s, SinrKind::min_bound, 200000, kSeed);
  CHECK(std::abs(app - mc.mean) <= 0.05 + 3.0 * mc.std_err);
}

TEST_CASE("optimizer coefficients from interference moments") {
  // Interference-free scenario: every coefficient collapses to 1.
  Scenario bare;
  const OptimCoefficients none = optim_coefficients(bare);
  CHECK(none.b1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(none.c1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(none.b2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(none.c2 == doctest::Approx(1.0).epsilon(1e-15));

  // Asymmetric preset: check against independent moment arithmetic,
  //   b_i = E[(1 + I_{Ti})^2],  c_i = (1 + E[I_R]) (1 + E[I_{Ti}]).
  const Scenario s = preset("fig6");
  const OptimCoefficients oc = optim_coefficients(s);
  double mt1 = 0, mt1_sq = 0, mt2 = 0, mt2_sq = 0, mr = 0, mr_sq = 0;
  interference_moments(s.spec(NodeId::T1), s.power, &mt1, &mt1_sq);
  interference_moments(s.spec(NodeId::T2), s.power, &mt2, &mt2_sq);
  interference_moments(s.spec(NodeId::R), s.power, &mr, &mr_sq);
  CHECK(oc.b1 == doctest::Approx(mt1_sq + 2.0 * mt1 + 1.0).epsilon(1e-13));
  CHECK(oc.b2 == doctest::Approx(mt2_sq + 2.0 * mt2 + 1.0).epsilon(1e-13));
  CHECK(oc.c1 == doctest::Approx((1.0 + mr) * (1.0 + mt1)).epsilon(1e-13));
  CHECK(oc.c2 == doctest::Approx((1.0 + mr) * (1.0 + mt2)).epsilon(1e-13));
  CHECK(oc.b1 == doctest::Approx(1.1835065213092608).epsilon(1e-12));
  CHECK(oc.b2 == doctest::Approx(3.6973777130926093).epsilon(1e-12));
}
