#include "capcov/coverage.hpp"

#include "capcov/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace capcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

void require_table(const CoeffTable& coeffs, int m) {
  if (coeffs.m != m || static_cast<int>(coeffs.entries.size()) != m) {
    throw std::invalid_argument("coefficient table is for m=" + std::to_string(coeffs.m) +
                                ", query needs m=" + std::to_string(m));
  }
}

double clamp_checked(double p, const char* what) {
  const double clamped = std::clamp(p, 0.0, 1.0);
  if (std::abs(clamped - p) > kClampLimit) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": assembled probability " << p << " is outside [0, 1]";
    throw ProbabilityRangeError(msg.str());
  }
  return clamped;
}

// binom(n, m+1) C(m, m) int_0^hi (1-t^2)^{(m^2-2)/2} (1 - lambda_m(t))^{n-m-1} dt
double infeasible_term(int n, int m, double hi, double cmm, const QuadSpec& spec) {
  if (hi <= 0.0) return 0.0;
  const QuadResult r = integrate_infeasible_kernel(n, m, 0.0, hi, spec);
  if (r.value <= 0.0) return 0.0;
  return std::exp(log_binomial(n, m + 1) + std::log(cmm) + std::log(r.value));
}

// 2^{1-n} sum_{k=lo}^{hi} binom(n-1, k)
double binomial_mass(int n, int lo, int hi) {
  KahanSum s;
  if (n - 1 <= 60) {
    for (int k = lo; k <= hi; ++k) s.add(static_cast<double>(binomial_exact(n - 1, k)));
    return std::ldexp(s.sum, 1 - n);
  }
  for (int k = lo; k <= hi; ++k) s.add(std::exp(log_binomial(n - 1, k) - (n - 1) * kLn2));
  return s.sum;
}

}  // namespace

double CoverageQuery::eps() const { return std::cos(kPi - alpha); }

void CoverageQuery::validate() const {
  if (m < 1) throw std::domain_error("coverage: need m >= 1");
  if (n <= m) throw std::domain_error("coverage: need n > m");
  if (!(alpha >= 0.0 && alpha <= kPi)) throw std::domain_error("coverage: alpha outside [0, pi]");
}

double p_not_covered_exact(const CoverageQuery& q, const CoeffTable& coeffs,
                           const QuadSpec& spec) {
  q.validate();
  if (q.alpha < 0.5 * kPi) {
    throw std::domain_error("p_not_covered_exact: alpha < pi/2 has no exact formula");
  }
  require_table(coeffs, q.m);
  const double eps = std::clamp(q.eps(), 0.0, 1.0);
  KahanSum s;
  for (int k = 1; k <= q.m; ++k) {
    const QuadResult r = integrate_coverage_kernel_scaled(q.n, q.m, k, eps, 1.0, spec);
    if (r.value <= 0.0) continue;
    s.add(std::exp(log_binomial(q.n, k + 1) + std::log(coeffs(k)) - (q.n - k - 1) * kLn2 +
                   std::log(r.value)));
  }
  return clamp_checked(s.sum, "p_not_covered_exact");
}

double p_not_covered_bound(const CoverageQuery& q, const CoeffTable& coeffs,
                           const QuadSpec& spec) {
  q.validate();
  if (q.alpha >= 0.5 * kPi) {
    throw std::domain_error("p_not_covered_bound: applies to alpha < pi/2 only");
  }
  require_table(coeffs, q.m);
  return wendel(q.n, q.m) + infeasible_term(q.n, q.m, std::abs(q.eps()), coeffs(q.m), spec);
}

double wendel(int n, int m) {
  if (n < 1 || m < 0) throw std::domain_error("wendel: need n >= 1, m >= 0");
  if (n <= m + 1) return 1.0;
  // Sum the smaller side of the binomial distribution.
  if (m + 1 <= (n - 1) / 2) return binomial_mass(n, 0, m);
  return 1.0 - binomial_mass(n, m + 1, n - 1);
}

double wendel_complement(int n, int m) {
  if (n < 1 || m < 0) throw std::domain_error("wendel: need n >= 1, m >= 0");
  if (n <= m + 1) return 0.0;
  if (m + 1 <= (n - 1) / 2) return 1.0 - binomial_mass(n, 0, m);
  return binomial_mass(n, m + 1, n - 1);
}

double stevens_exact(int n, double alpha) {
  if (n < 1) throw std::domain_error("stevens_exact: need n >= 1");
  if (!(alpha > 0.0 && alpha <= kPi)) throw std::domain_error("stevens_exact: alpha outside (0, pi]");
  const int kmax = static_cast<int>(std::floor(kPi / alpha));
  KahanSum s;
  for (int j = 1; j <= std::min(kmax, n); ++j) {
    const double base = 1.0 - j * alpha / kPi;
    if (base <= 0.0) continue;
    const double term = binomial(n, j) * std::pow(base, n - 1);
    s.add(j % 2 == 1 ? term : -term);
  }
  return s.sum;
}

GilbertBounds gilbert_bounds(int n, double alpha) {
  if (n < 1) throw std::domain_error("gilbert_bounds: need n >= 1");
  if (!(alpha >= 0.0 && alpha <= kPi)) throw std::domain_error("gilbert_bounds: alpha outside [0, pi]");
  const double s = std::sin(0.5 * alpha);
  const double lambda = s * s;
  GilbertBounds b;
  b.lower = std::pow(1.0 - lambda, n);
  b.upper = 4.0 / 3.0 * n * (n - 1.0) * lambda * std::pow(1.0 - lambda, n - 1);
  b.valid = n >= 2;
  return b;
}

double miles_exact(int n, double alpha, const QuadSpec& spec) {
  if (n < 2) throw std::domain_error("miles_exact: need n >= 2");
  if (!(alpha >= 0.5 * kPi && alpha <= kPi)) {
    throw std::domain_error("miles_exact: alpha outside [pi/2, pi]");
  }
  const double hi = kPi - alpha;
  if (hi <= 0.0) return 0.0;
  const auto first = integrate(
      [n](double th) { return std::pow(std::sin(0.5 * th), 2 * (n - 2)) * std::sin(2.0 * th); },
      0.0, hi, spec);
  double p = binomial(n, 2) * first.value;
  if (n >= 3) {
    const auto second = integrate(
        [n](double th) {
          const double s = std::sin(th);
          return std::pow(std::sin(0.5 * th), 2 * (n - 3)) * s * s * s;
        },
        0.0, hi, spec);
    p += 0.75 * binomial(n, 3) * second.value;
  }
  return p;
}

double expected_caps_bound(int m, double alpha) {
  if (m < 1) throw std::domain_error("expected_caps_bound: need m >= 1");
  if (!(alpha > 0.0 && alpha <= 0.5 * kPi)) {
    throw std::domain_error("expected_caps_bound: alpha outside (0, pi/2]");
  }
  const double c = std::cos(alpha);
  const double base = 3.0 * m + 2.0;
  if (c <= 0.0) return base;
  const double ll = log_cap_fraction(m, c);
  return base + std::exp(0.5 * std::log(static_cast<double>(m)) + std::log(m + 1.0) +
                         std::log(c) - 2.0 * ll - m * (kLn2 + ll));
}

SeriesResult expected_caps_series(int m, double alpha, const CoeffTable& coeffs,
                                  const QuadSpec& spec, int terms) {
  if (m < 1) throw std::domain_error("expected_caps_series: need m >= 1");
  if (!(alpha > 0.0 && alpha <= 0.5 * kPi)) {
    throw std::domain_error("expected_caps_series: alpha outside (0, pi/2]");
  }
  if (terms < 1) throw std::domain_error("expected_caps_series: need terms >= 1");
  require_table(coeffs, m);
  // |cos(alpha)| below this is the rounding of cos(pi/2); treat as zero.
  const double eps = std::cos(alpha) < 1e-15 ? 0.0 : std::cos(alpha);
  const double cmm = coeffs(m);

  SeriesResult out;
  out.terms = terms;
  KahanSum s;
  s.add(m + 1.0);
  for (int n = m + 1; n <= m + terms; ++n) {
    s.add(std::min(1.0, wendel(n, m) + infeasible_term(n, m, eps, cmm, spec)));
  }
  out.partial_sum = s.sum;

  // Remaining terms n > N: each part is dominated by a geometric series
  // whose ratio is bounded using the ratio of consecutive terms at n = N+1.
  const int N = m + terms;
  const double w_ratio = (N + 1.0) / (2.0 * (N + 1.0 - m));
  double tail = std::numeric_limits<double>::infinity();
  if (w_ratio < 1.0) {
    tail = wendel(N + 1, m) / (1.0 - w_ratio);
    if (eps > 0.0) {
      const double z_max = 1.0 - cap_fraction(m, eps);
      const double c_ratio = (N + 2.0) * z_max / (N + 1.0 - m);
      if (c_ratio < 1.0) {
        tail += infeasible_term(N + 1, m, eps, cmm, spec) / (1.0 - c_ratio);
      } else {
        tail = std::numeric_limits<double>::infinity();
      }
    }
  }
  out.tail_bound = tail;
  return out;
}

}  // namespace capcov
