// Numerical primitives: compensated summation, gamma-family functions, and
// the adaptive quadrature with its semi-infinite transforms.
#include <doctest.h>

#include <cmath>

#include "twr/specfun.hpp"

using namespace twr;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;
}  // namespace

TEST_CASE("kahan accumulator recovers mass a naive sum loses") {
  // A million terms of 1e-17 vanish individually against 3.0 (one ulp of 3
  // is ~4.4e-16), so a naive sum returns exactly 0 after the final -3.0.
  // The compensated accumulator carries them and the final add flushes the
  // carry back into the sum.
  KahanSum k;
  double naive = 0.0;
  k.add(3.0);
  naive += 3.0;
  for (int i = 0; i < 1000000; ++i) {
    k.add(1e-17);
    naive += 1e-17;
  }
  k.add(-3.0);
  naive += -3.0;
  CHECK(naive == 0.0);
  CHECK(k.value() == doctest::Approx(1e-11).epsilon(1e-3));

  KahanSum tenths;
  for (int i = 0; i < 10; ++i) tenths.add(0.1);
  CHECK(tenths.value() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gamma function spot values and recurrence") {
  CHECK(gamma_fn(0.5) == doctest::Approx(kSqrtPi).epsilon(1e-13));
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gamma_fn(2.5) == doctest::Approx(1.3293403881791370).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  // Gamma(x+1) = x Gamma(x)
  const double x = 3.7;
  CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-13));
  // agreement with the standard library
  for (double a : {0.3, 1.8, 4.2, 9.5})
    CHECK(gamma_fn(a) == doctest::Approx(std::tgamma(a)).epsilon(1e-13));
}

TEST_CASE("erfc spot values") {
  CHECK(twr::erfc(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(twr::erfc(1.0) == doctest::Approx(0.15729920705028513).epsilon(1e-14));
  for (double x : {0.2, 0.9, 2.5, 4.0})
    CHECK(twr::erfc(x) == doctest::Approx(std::erfc(x)).epsilon(1e-13));
}

TEST_CASE("lower incomplete gamma identities") {
  // L(1, x) = 1 - e^-x
  for (double x : {0.2, 1.0, 5.0, 20.0})
    CHECK(lower_inc_gamma(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));

  // recurrence L(a+1, x) = a L(a, x) - x^a e^-x
  for (double a : {1.3, 2.5}) {
    for (double x : {0.7, 3.0, 9.0}) {
      const double lhs = lower_inc_gamma(a + 1.0, x);
      const double rhs = a * lower_inc_gamma(a, x) - std::pow(x, a) * std::exp(-x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  // L(1/2, x^2) = sqrt(pi) erf(x)
  const double x = 1.1;
  CHECK(lower_inc_gamma(0.5, x * x) ==
        doctest::Approx(kSqrtPi * (1.0 - std::erfc(x))).epsilon(1e-12));

  // saturation to the complete Gamma and the empty integral
  CHECK(lower_inc_gamma(3.0, 700.0) == doctest::Approx(gamma_fn(3.0)).epsilon(1e-13));
  CHECK(lower_inc_gamma(2.2, 0.0) == 0.0);

  // monotone in x
  CHECK(lower_inc_gamma(1.7, 2.0) < lower_inc_gamma(1.7, 2.5));
}

TEST_CASE("finite-interval quadrature on smooth integrands") {
  QuadratureResult r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  r = integrate([](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quadrature reports failure instead of a silent wrong answer") {
  // Violently oscillatory integrand with a tiny panel budget: the error
  // estimate cannot be driven down, and the result must say so.
  QuadratureSpec q;
  q.max_subdivisions = 16;
  const QuadratureResult r =
      integrate([](double x) { return std::cos(1e9 * x); }, 0.0, 1.0, q);
  CHECK_FALSE(r.converged);
}

TEST_CASE("semi-infinite quadrature: exponential-tail transform") {
  QuadratureSpec q;
  q.transform = QuadTransform::exp_tail;
  CHECK(integrate_semi_infinite([](double x) { return std::exp(-x); }, q).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_semi_infinite([](double x) { return x * x * x * std::exp(-x); }, q).value ==
        doctest::Approx(6.0).epsilon(1e-7));
  // Gamma(a) as the defining integral
  for (double a : {2.5, 5.0}) {
    const QuadratureResult r = integrate_semi_infinite(
        [a](double x) { return std::pow(x, a - 1.0) * std::exp(-x); }, q);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(gamma_fn(a)).epsilon(1e-7));
  }
}

TEST_CASE("semi-infinite quadrature: square-root origin transform") {
  QuadratureSpec q;
  q.transform = QuadTransform::sqrt_origin;
  // integral of e^-x / sqrt(x) = sqrt(pi); integrable singularity at 0
  CHECK(integrate_semi_infinite([](double x) { return std::exp(-x) / std::sqrt(x); }, q).value ==
        doctest::Approx(kSqrtPi).epsilon(1e-9));
  // Gamma(1/2) as the defining integral
  const QuadratureResult r = integrate_semi_infinite(
      [](double x) { return std::pow(x, -0.5) * std::exp(-x); }, q);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(gamma_fn(0.5)).epsilon(1e-7));
}

TEST_CASE("semi-infinite quadrature: panel doubling without a transform") {
  QuadratureSpec q;  // QuadTransform::none
  const QuadratureResult r =
      integrate_semi_infinite([](double x) { return std::exp(-x); }, q);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("panel doubling reaches mass far from the origin") {
  // A unit-mass bump centred at x = 200: every panel near the origin is
  // numerically zero, so an integrator that stops after a run of quiet
  // panels before having seen any mass would return 0.
  QuadratureSpec q;
  const QuadratureResult r = integrate_semi_infinite(
      [](double x) {
        const double u = x - 200.0;
        return std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
      },
      q);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("panel doubling recognises a genuinely zero integrand") {
  QuadratureSpec q;
  const QuadratureResult r = integrate_semi_infinite([](double) { return 0.0; }, q);
  CHECK(r.converged);
  CHECK(r.value == 0.0);
}
