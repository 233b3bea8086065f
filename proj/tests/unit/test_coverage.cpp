#include "capcov/coverage.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace capcov;
using doctest::Approx;

namespace {

// Stevens' formula evaluated term by term, independently of the library.
double stevens(int n, double alpha) {
  double s = 0.0;
  for (int j = 1; j <= n && j * alpha < oracle::pi; ++j) {
    s += (j % 2 ? 1 : -1) * oracle::binomial(n, j) * std::pow(1 - j * alpha / oracle::pi, n - 1);
  }
  return s;
}

}  // namespace

TEST_CASE("Wendel probabilities") {
  CHECK(wendel(3, 1) == Approx(0.75));
  CHECK(wendel(4, 2) == Approx(7.0 / 8));
  CHECK(wendel(2, 5) == 1.0);
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 40; ++n) {
      double s = 0.0;
      for (int k = 0; k <= m; ++k) s += oracle::binomial(n - 1, k);
      const double want = std::min(1.0, s / std::pow(2.0, n - 1));
      CHECK(wendel(n, m) == Approx(want).epsilon(1e-13));
      CHECK(wendel(n, m) + wendel_complement(n, m) == Approx(1.0).epsilon(1e-14));
    }
  }
  // The complement keeps its relative accuracy when wendel is close to 1.
  CHECK(wendel_complement(12, 10) == Approx(1.0 / 2048).epsilon(1e-14));
}

TEST_CASE("exact non-coverage probability") {
  const CoeffTable t1 = coeff_table(1);
  const CoeffTable t2 = coeff_table(2);
  CHECK(p_not_covered_exact({4, 1, oracle::pi / 2}, t1) == Approx(0.5).epsilon(1e-10));
  CHECK(p_not_covered_exact({6, 2, oracle::pi}, t2) == Approx(0.0));
  CHECK(p_not_covered_exact({5, 2, 2 * oracle::pi / 3}, t2) ==
        Approx(miles_exact(5, 2 * oracle::pi / 3)).epsilon(1e-9));
  for (int n = 2; n <= 12; ++n) {
    for (double a : {1.7, 2.2, 2.9}) {
      CHECK(p_not_covered_exact({n, 1, a}, t1) == Approx(stevens(n, a)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(p_not_covered_exact({5, 2, 1.0}, t2), std::domain_error);
  CHECK_THROWS_AS(p_not_covered_exact({5, 2, 2.0}, t1), std::invalid_argument);
  CHECK_THROWS_AS(p_not_covered_exact({2, 2, 2.0}, t2), std::domain_error);
}

TEST_CASE("upper bound below pi/2") {
  const CoeffTable t1 = coeff_table(1);
  // Equal to the first Stevens term here.
  CHECK(p_not_covered_bound({10, 1, oracle::pi / 3}, t1) ==
        Approx(10 * std::pow(2.0 / 3, 9)).epsilon(1e-9));
  CHECK(p_not_covered_bound({10, 1, oracle::pi / 3}, t1) >= stevens(10, oracle::pi / 3));
  // Tends to Wendel as alpha -> pi/2.
  const CoeffTable t3 = coeff_table(3);
  CHECK(p_not_covered_bound({9, 3, oracle::pi / 2 - 1e-9}, t3) == Approx(wendel(9, 3)).epsilon(1e-7));
}

TEST_CASE("Stevens, Gilbert and Miles") {
  CHECK(stevens_exact(2, oracle::pi / 2) == Approx(1.0));
  CHECK(stevens_exact(3, oracle::pi / 2) == Approx(0.75));
  CHECK(stevens_exact(5, 2 * oracle::pi / 3) == Approx(5.0 / 81));
  const GilbertBounds g1 = gilbert_bounds(1, oracle::pi / 2);
  CHECK_FALSE(g1.valid);
  CHECK(g1.lower == Approx(0.5));
  const GilbertBounds g = gilbert_bounds(10, oracle::pi / 2);
  CHECK(g.lower == Approx(std::pow(0.5, 10)));
  CHECK(g.upper == Approx(4.0 / 3 * 90 * 0.5 * std::pow(0.5, 9)));
  CHECK(g.lower <= wendel(10, 2));
  CHECK(wendel(10, 2) <= g.upper);
  CHECK(miles_exact(4, oracle::pi / 2) == Approx(wendel(4, 2)).epsilon(1e-9));
  CHECK(miles_exact(7, oracle::pi) == 0.0);
}

TEST_CASE("expected number of caps") {
  CHECK(expected_caps_bound(2, oracle::pi / 2) == Approx(8.0));
  CHECK(expected_caps_bound(1, oracle::pi / 2) == Approx(5.0));
  CHECK(expected_caps_bound(2, oracle::pi / 3) == Approx(8 + 96 * std::sqrt(2.0)).epsilon(1e-12));
  // E(N) = sum_{n>=0} Prob{N > n}: 1 + 1 + sum_{n>=2} n 2^{1-n} = 5 on the circle.
  const SeriesResult s1 = expected_caps_series(1, oracle::pi / 2, coeff_table(1), {}, 200);
  CHECK(s1.partial_sum == Approx(5.0).epsilon(1e-12));
  CHECK(s1.tail_bound < 1e-6);
  const SeriesResult s2 = expected_caps_series(2, oracle::pi / 2, coeff_table(2), {}, 200);
  CHECK(s2.partial_sum == Approx(7.0).epsilon(1e-12));
  const SeriesResult s3 = expected_caps_series(2, oracle::pi / 3, coeff_table(2), {}, 200);
  CHECK(s3.partial_sum + s3.tail_bound <= expected_caps_bound(2, oracle::pi / 3));
}
