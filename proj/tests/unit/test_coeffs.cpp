#include "capcov/coeffs.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace capcov;
using doctest::Approx;

TEST_CASE("closed forms") {
  CHECK(*coeff_closed_form(1, 1) == Approx(2 / oracle::pi).epsilon(1e-14));
  CHECK(*coeff_closed_form(2, 1) == Approx(2.0).epsilon(1e-14));
  CHECK(*coeff_closed_form(4, 4) == Approx(15.0 / 32).epsilon(1e-14));
  CHECK(*coeff_closed_form(3, 2) == Approx(1.5 * (1 + 16 / (oracle::pi * oracle::pi))).epsilon(1e-14));
  CHECK_FALSE(coeff_closed_form(4, 2).has_value());
}

TEST_CASE("bounds bracket the coefficients") {
  // m = k: lower = upper.
  const CoeffBounds b55 = coeff_bounds(5, 5);
  CHECK(b55.lower == Approx(b55.upper_bracket).epsilon(1e-12));
  CHECK(b55.lower == Approx(1 / oracle::pi).epsilon(1e-12));
  const CoeffBounds b21 = coeff_bounds(2, 1);
  CHECK(b21.lower == Approx(1.0).epsilon(1e-12));
  CHECK(b21.upper_bracket == Approx(2.0).epsilon(1e-12));
  CHECK(coeff_bounds(6, 6).upper_explicit == Approx(7 * std::sqrt(6.0) / 64).epsilon(1e-12));
  for (int m = 1; m <= 7; ++m) {
    const CoeffTable t = coeff_table(m);
    for (int k = 1; k <= m; ++k) {
      const CoeffBounds b = coeff_bounds(m, k);
      CAPTURE(m);
      CAPTURE(k);
      CHECK(b.lower <= t(k) * (1 + 1e-9));
      CHECK(t(k) <= b.upper * (1 + 1e-9));
    }
  }
}

TEST_CASE("weighted integrals and the identity") {
  CHECK(coeff_integral_I(2, 1, 1) == Approx(oracle::pi).epsilon(1e-10));
  CHECK(coeff_integral_I(3, 2, 2) == Approx(8.0 / 3).epsilon(1e-12));
  // sum_k I(3,2,k) C(2,k) = binom(2,0) + binom(2,1) + binom(2,2).
  CHECK(coeff_identity_rhs(3, 2) == 4.0);
  const CoeffTable t2 = coeff_table(2);
  CHECK(coeff_integral_I(3, 2, 1) * t2(1) + coeff_integral_I(3, 2, 2) * t2(2) ==
        Approx(4.0).epsilon(1e-10));
  for (int m = 1; m <= 4; ++m) {
    for (int n = m + 1; n <= 3 * m + 2; ++n) CHECK(coeff_identity_residual(coeff_table(m), n) < 1e-9);
  }
}

TEST_CASE("linear system reproduces the closed forms") {
  for (int m = 1; m <= 7; ++m) {
    const CoeffTable sys = coeff_solve_linear_system(m);
    CHECK(sys.m == m);
    CHECK_FALSE(sys.degraded);
    for (int k = 1; k <= m; ++k) {
      CHECK(sys.at(k).provenance == Provenance::LinearSystem);
      if (auto c = coeff_closed_form(m, k)) CHECK(sys(k) == Approx(*c).epsilon(1e-8));
    }
  }
  const CoeffTable t4 = coeff_solve_linear_system(4);
  CHECK(t4(2) == Approx(477.0 / 32).epsilon(1e-9));
  CHECK_THROWS_AS(coeff_solve_linear_system(11), std::domain_error);
  CHECK_THROWS_AS(coeff_solve_linear_system(0), std::domain_error);
}

TEST_CASE("simplex helpers") {
  Eigen::MatrixXd tri(2, 3);
  tri << 0, 1, 0, 0, 0, 1;
  CHECK(simplex_volume(tri) == Approx(0.5));
  Eigen::MatrixXd around(2, 3);
  around << 1, -0.5, -0.5, 0, 0.8, -0.8;
  CHECK(is_centered(around));
  CHECK_FALSE(is_centered(tri));  // origin is a vertex
  Eigen::MatrixXd flat(2, 3);
  flat << 1, -1, 2, 0, 0, 0;
  CHECK_FALSE(is_centered(flat));
}

TEST_CASE("Monte Carlo coefficients match the table") {
  const McEstimate e = coeff_monte_carlo(2, 2, 200000, 11);
  CHECK(e.within(0.75, 4.0));
  const McEstimate e31 = coeff_monte_carlo(3, 1, 200000, 12);
  CHECK(e31.within(5.0930, 4.0));
  // Reproducible and independent of the worker count.
  const McEstimate a = coeff_monte_carlo(3, 2, 20000, 5, 1);
  const McEstimate b = coeff_monte_carlo(3, 2, 20000, 5, 3);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("CSV round trip") {
  CoeffTable t = coeff_solve_linear_system(5);
  const auto parsed = parse_coeff_csv(coeff_table_csv(t));
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].m == 5);
  for (int k = 1; k <= 5; ++k) {
    CHECK(parsed[0](k) == t(k));
    CHECK(parsed[0].at(k).provenance == t.at(k).provenance);
    CHECK(parsed[0].at(k).uncertainty == t.at(k).uncertainty);
  }
  CHECK(provenance_from_string(to_string(Provenance::MonteCarlo)) == Provenance::MonteCarlo);
  CHECK_THROWS(parse_coeff_csv("m,k,value,provenance,uncertainty\n3,1,5.0,closed-form,0\n"));
}
