#include "capcov/condition.hpp"
#include "capcov/coverage.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace capcov;
using doctest::Approx;

TEST_CASE("feasible tail: normalization and a quadrature value") {
  for (int m = 1; m <= 3; ++m) {
    const CoeffTable t = coeff_table(m);
    for (int n = m + 1; n <= m + 5; ++n) CHECK(cond_tail_feasible(n, m, 1.0, t) == Approx(1.0).epsilon(1e-10));
  }
  // (8/4) binom(4,2) (2/pi) int_0^{1/2} (1-t^2)^{-1/2} (arccos t / pi)^2 dt,
  // integrated in theta = arccos t to remove the endpoint singularity.
  const double integral = oracle::simpson(
      [](double th) { return std::pow(th / oracle::pi, 2); }, std::acos(0.5), oracle::pi / 2);
  const double want = 2.0 * 6.0 * (2 / oracle::pi) * integral;
  CHECK(cond_tail_feasible(4, 1, 0.5, coeff_table(1)) == Approx(want).epsilon(1e-9));
  CHECK(cond_tail_feasible(6, 2, 1e-12, coeff_table(2)) < 1e-9);
}

TEST_CASE("feasible tail and exact coverage describe the same event") {
  // p(n,m,alpha) = wendel(n,m) (1 - Prob{C >= 1/eps | feasible}), eps = |cos alpha|.
  for (int m = 1; m <= 3; ++m) {
    const CoeffTable t = coeff_table(m);
    for (int n = m + 1; n <= m + 4; ++n) {
      for (double a : {1.8, 2.3, 2.8}) {
        const double eps = -std::cos(a);
        CHECK(p_not_covered_exact({n, m, a}, t) ==
              Approx(wendel(n, m) * (1 - cond_tail_feasible(n, m, eps, t))).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("infeasible tail bound") {
  const CoeffTable t1 = coeff_table(1);
  const TailBound b = cond_tail_infeasible_bound(6, 1, 0.3, t1);
  CHECK(b.value > 0.0);
  CHECK(b.value <= 1.0);
  CHECK(cond_tail_infeasible_bound(6, 1, 1e-9, t1).value < 1e-6);
  CHECK_THROWS_AS(cond_tail_infeasible_bound(3, 2, 0.5, coeff_table(2)), std::domain_error);
  // Clamping is reported.
  const TailBound big = cond_tail_infeasible_bound(10, 2, 0.9, coeff_table(2));
  CHECK(big.value == 1.0);
  CHECK(big.clamped);
  CHECK(big.raw > 1.0);
}

TEST_CASE("explicit tail bounds and their regimes") {
  const ExplicitTail p = tail_bound_explicit(10, 1, 0.01);
  REQUIRE(p.infeasible.has_value());
  CHECK(*p.infeasible == Approx(2 * std::exp(1.0) * std::pow(2.0, 1.5) / 100).epsilon(1e-12));
  CHECK_FALSE(tail_bound_explicit(10, 2, 1.0 / 8).feasible.has_value());
  const ExplicitTail q = tail_bound_explicit(10, 2, 1.0 / 9);
  REQUIRE(q.feasible.has_value());
  CHECK(*q.feasible ==
        Approx(std::sqrt(2 * oracle::pi * std::exp(1.0)) * std::pow(3.0, 1.75) / 9).epsilon(1e-12));
}

TEST_CASE("expected log condition bounds") {
  CHECK(expected_ln_cond_bound(1) == Approx(2 * std::log(2.0) + 3.31));
  CHECK(expected_ln_cond_bound(9) == Approx(7.915).epsilon(1e-4));
  CHECK(expectation_from_tail(1, 1) == Approx(1.0));
  CHECK(expectation_from_tail(std::exp(1.0), std::exp(1.0)) == Approx(2.0));
  CHECK(expectation_from_tail(9.6 * 4, 13 * 4) ==
        Approx(2 * std::log(2.0) + std::log(13.0) + 9.6 / 13));
}
