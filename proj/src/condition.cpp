#include "capcov/condition.hpp"

#include "capcov/coverage.hpp"
#include "capcov/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace capcov {

namespace {

void require_shape(int n, int m, double eps) {
  if (m < 1 || n <= m) throw std::domain_error("condition tail: need n > m >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("condition tail: eps outside (0, 1]");
}

}  // namespace

double cond_tail_feasible(int n, int m, double eps, const CoeffTable& coeffs,
                          const QuadSpec& spec) {
  require_shape(n, m, eps);
  if (coeffs.m != m) throw std::invalid_argument("condition tail: coefficient table mismatch");
  double sum = 0.0;
  double comp = 0.0;
  for (int k = 1; k <= m; ++k) {
    const QuadResult r = integrate_coverage_kernel_scaled(n, m, k, 0.0, eps, spec);
    if (r.value <= 0.0) continue;
    const double term = std::exp(log_binomial(n, k + 1) + std::log(coeffs(k)) -
                                 (n - k - 1) * std::numbers::ln2 + std::log(r.value));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / wendel(n, m);
}

TailBound cond_tail_infeasible_bound(int n, int m, double eps, const CoeffTable& coeffs,
                                     const QuadSpec& spec) {
  require_shape(n, m, eps);
  if (n == m + 1) {
    throw std::domain_error("infeasible tail: n = m + 1 instances are almost surely feasible");
  }
  if (coeffs.m != m) throw std::invalid_argument("condition tail: coefficient table mismatch");
  TailBound b;
  const QuadResult r = integrate_infeasible_kernel(n, m, 0.0, eps, spec);
  if (r.value > 0.0) {
    b.raw = std::exp(log_binomial(n, m + 1) + std::log(coeffs(m)) + std::log(r.value) -
                     std::log(wendel_complement(n, m)));
  }
  b.value = std::min(b.raw, 1.0);
  b.clamped = b.raw > 1.0;
  return b;
}

ExplicitTail tail_bound_explicit(int n, int m, double eps) {
  require_shape(n, m, eps);
  const double inv = 1.0 / eps;
  const double m1 = m + 1.0;
  ExplicitTail out;
  if (inv >= 13.0 * std::pow(m1, 1.5)) out.infeasible = 2.0 * std::numbers::e * std::pow(m1, 1.5) * eps;
  if (inv >= m1 * m1) {
    out.feasible = std::sqrt(2.0 * std::numbers::pi * std::numbers::e) * std::pow(m1, 1.75) * eps;
  }
  return out;
}

double expected_ln_cond_bound(int m) {
  if (m < 1) throw std::domain_error("expected_ln_cond_bound: need m >= 1");
  return 2.0 * std::log(m + 1.0) + 3.31;
}

double expectation_from_tail(double K, double t0) {
  if (!(K > 0.0 && t0 > 0.0)) throw std::domain_error("expectation_from_tail: need K, t0 > 0");
  return std::log(t0) + K / t0;
}

}  // namespace capcov
