#include "capcov/coverage.hpp"
#include "capcov/condition.hpp"
#include "capcov/mc.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace capcov;
using doctest::Approx;

namespace {

McConfig cfg(long trials, std::uint64_t seed, int workers = 1) {
  McConfig c;
  c.trials = trials;
  c.seed = seed;
  c.workers = workers;
  return c;
}

bool within(double est, double p, long n, double z = 4.0) {
  return std::abs(est - p) <= z * std::sqrt(p * (1 - p) / n) + 1e-12;
}

}  // namespace

TEST_CASE("coverage frequencies") {
  CHECK(within(mc_coverage(4, 1, oracle::pi / 2, cfg(40000, 1)).value, 0.5, 40000));
  CHECK(within(mc_coverage(5, 2, 2 * oracle::pi / 3, cfg(40000, 2)).value,
               miles_exact(5, 2 * oracle::pi / 3), 40000));
  // n <= m+1 caps of radius <= pi/2 never cover.
  CHECK(mc_coverage(3, 2, oracle::pi / 2, cfg(5000, 3)).value == 1.0);
  CHECK(mc_coverage(2, 4, 1.0, cfg(5000, 3)).value == 1.0);
}

TEST_CASE("results do not depend on the worker count") {
  const McEstimate a = mc_coverage(6, 2, 2.0, cfg(20000, 9, 1));
  const McEstimate b = mc_coverage(6, 2, 2.0, cfg(20000, 9, 4));
  CHECK(a.value == b.value);
  const McEstimate c = mc_expected_ln_cond(6, 2, cfg(9000, 4, 1));
  const McEstimate d = mc_expected_ln_cond(6, 2, cfg(9000, 4, 3));
  CHECK(c.value == d.value);
  CHECK(c.ci95 == d.ci95);
  CHECK(mc_coverage(6, 2, 2.0, cfg(20000, 10)).value != a.value);
}

TEST_CASE("condition tails") {
  const CondTailsMc r = mc_condition_tails(6, 2, {0.5, 1.0}, cfg(40000, 5));
  CHECK(within(r.feasible_fraction.value, 0.5, 40000));
  CHECK(r.feasible_tail[1].value == 1.0);
  CHECK(r.infeasible_tail[1].value == 1.0);
  CHECK(r.feasible + r.infeasible + r.ill_posed == 40000);
  const CondTailsMc s = mc_condition_tails(5, 1, {0.5}, cfg(40000, 6));
  CHECK(within(s.feasible_tail[0].value, cond_tail_feasible(5, 1, 0.5, coeff_table(1)), s.feasible));
  CHECK_THROWS_AS(mc_condition_tails(5, 1, {0.0}, cfg(10, 1)), std::domain_error);
}

TEST_CASE("expected number of caps") {
  const McEstimate e = mc_expected_caps(2, oracle::pi / 2, cfg(10000, 7));
  CHECK(e.within(7.0, 4.0));
  CHECK_FALSE(e.lower_bound);
  const McEstimate e1 = mc_expected_caps(1, oracle::pi / 2, cfg(10000, 8));
  CHECK(e1.within(5.0, 4.0));
  // A tiny draw cap censors every trial and flags the estimate.
  const McEstimate c = mc_expected_caps(2, oracle::pi / 2, cfg(100, 1), 2);
  CHECK(c.lower_bound);
  CHECK(c.censored == 100);
  CHECK(c.value == 2.0);
}

TEST_CASE("expected log condition number") {
  const McEstimate a = mc_expected_ln_cond(10, 2, cfg(10000, 1));
  CHECK(a.value <= expected_ln_cond_bound(2));
  CHECK(a.ci95.first < a.value);
  CHECK(a.value < a.ci95.second);
  const McEstimate b = mc_expected_ln_cond(10, 2, cfg(10000, 2));
  // Two disjoint seeds give overlapping intervals.
  CHECK(a.ci95.first < b.ci95.second);
  CHECK(b.ci95.first < a.ci95.second);
}

TEST_CASE("determinant moments") {
  CHECK(det_moment_exact(2, 2) == Approx(2 / oracle::pi).epsilon(1e-12));
  // E|det|^2 for 2 x 2 rows on S^1 is E sin^2 = 1/2.
  CHECK(det_moment_exact(3, 2) == Approx(0.5).epsilon(1e-12));
  // Squared determinants of k isotropic unit rows average k!/k^k.
  CHECK(det_moment_exact(4, 3) == Approx(6.0 / 27).epsilon(1e-12));
  CHECK(det_moment_exact(5, 4) == Approx(24.0 / 256).epsilon(1e-12));
  CHECK(mc_det_moment(2, 2, cfg(200000, 3)).within(2 / oracle::pi, 4.0));
  CHECK(mc_det_moment(4, 3, cfg(200000, 4)).within(det_moment_exact(4, 3), 4.0));
  CHECK(mc_det_moment(3, 1, cfg(100, 4)).value == 1.0);
  CHECK_THROWS_AS(mc_det_moment(2, 3, cfg(10, 1)), std::domain_error);
}
