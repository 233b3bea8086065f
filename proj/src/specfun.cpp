#include "capcov/specfun.hpp"

#include "capcov/quad.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace capcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kExactBinomialLimit = 60;

void require_dimension(int m, int min, const char* what) {
  if (m < min) {
    throw std::domain_error(std::string(what) + ": dimension " + std::to_string(m) +
                            " below " + std::to_string(min));
  }
}

// Fraction of S^m covered by a cap of angular radius theta <= pi/2, given
// x = sin^2(theta) and y = cos^2(theta). Uses I_x(m/2, 1/2) = 1 - I_y(1/2, m/2)
// on whichever argument is smaller so neither end loses digits.
template <class Real>
Real small_cap(int m, Real x, Real y) {
  const Real half = Real(1) / 2;
  if (x <= 0) return 0;
  if (y <= 0) return half;
  if (x <= y) return half * boost::math::ibeta(half * m, half, x);
  return half * boost::math::ibetac(half, half * m, y);
}

// 1 - small_cap(m, x, y), the complementary large cap.
template <class Real>
Real large_cap(int m, Real x, Real y) {
  const Real half = Real(1) / 2;
  if (x <= 0) return 1;
  if (y <= 0) return half;
  if (x <= y) return 1 - half * boost::math::ibeta(half * m, half, x);
  return half + half * boost::math::ibeta(half, half * m, y);
}

void require_cosine(double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw std::domain_error("cap_fraction: cosine outside [-1, 1]");
  }
}

void require_angle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::domain_error("cap_fraction: angle outside [0, pi]");
  }
}

}  // namespace

double log_sphere_volume(int m) {
  require_dimension(m, 0, "sphere_volume");
  const double h = 0.5 * (m + 1);
  return std::log(2.0) + h * std::log(kPi) - std::lgamma(h);
}

double sphere_volume(int m) {
  require_dimension(m, 0, "sphere_volume");
  // Exact low-dimensional values avoid lgamma rounding where tests pin them.
  switch (m) {
    case 0: return 2.0;
    case 1: return 2.0 * kPi;
    case 2: return 4.0 * kPi;
    case 3: return 2.0 * kPi * kPi;
    default: break;
  }
  const double h = 0.5 * (m + 1);
  if (m < 150) return 2.0 * std::pow(kPi, h) / std::tgamma(h);
  return std::exp(log_sphere_volume(m));
}

double alpha_m(int m) {
  require_dimension(m, 1, "alpha_m");
  if (m < 150) return 2.0 * sphere_volume(m - 1) / sphere_volume(m);
  return 2.0 * std::exp(log_sphere_volume(m - 1) - log_sphere_volume(m));
}

double cap_fraction_angle(int m, double theta) {
  require_dimension(m, 1, "cap_fraction");
  require_angle(theta);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return theta <= 0.5 * kPi ? small_cap(m, s * s, c * c) : large_cap(m, s * s, c * c);
}

// ln of the small or large cap; an underflowing double result is redone in
// long double, whose exponent range reaches about 1e-4900.
double log_cap(int m, double x, double y, bool small) {
  const double v = small ? small_cap(m, x, y) : large_cap(m, x, y);
  if (v > 1e-290) return std::log(v);
  const long double lx = x;
  const long double ly = y;
  return static_cast<double>(std::log(small ? small_cap(m, lx, ly) : large_cap(m, lx, ly)));
}

double log_cap_fraction_angle(int m, double theta) {
  require_dimension(m, 1, "cap_fraction");
  require_angle(theta);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return log_cap(m, s * s, c * c, theta <= 0.5 * kPi);
}

long double cap_fraction_angle_ext(int m, long double theta) {
  require_dimension(m, 1, "cap_fraction");
  if (!(theta >= 0 && theta <= std::numbers::pi_v<long double>)) {
    throw std::domain_error("cap_fraction: angle outside [0, pi]");
  }
  const long double s = std::sin(theta);
  const long double c = std::cos(theta);
  return theta <= std::numbers::pi_v<long double> / 2 ? small_cap(m, s * s, c * c)
                                                       : large_cap(m, s * s, c * c);
}

double cap_fraction(int m, double t) {
  require_dimension(m, 1, "cap_fraction");
  require_cosine(t);
  const double x = (1.0 - t) * (1.0 + t);
  const double y = t * t;
  return t >= 0.0 ? small_cap(m, x, y) : large_cap(m, x, y);
}

double log_cap_fraction(int m, double t) {
  require_dimension(m, 1, "cap_fraction");
  require_cosine(t);
  return log_cap(m, (1.0 - t) * (1.0 + t), t * t, t >= 0.0);
}

double cap_fraction_quadrature(int m, double t) {
  require_dimension(m, 1, "cap_fraction");
  require_cosine(t);
  const double theta = std::acos(t);
  QuadSpec spec;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 0.0;
  const auto r = integrate([m](double x) { return std::pow(std::sin(x), m - 1); }, 0.0, theta,
                           spec);
  const double ratio = std::exp(log_sphere_volume(m - 1) - log_sphere_volume(m));
  return ratio * r.value;
}

double log_grassmann_volume(int k, int ambient) {
  if (k < 1 || k > ambient) {
    throw std::domain_error("grassmann_volume: need 1 <= k <= ambient dimension");
  }
  double s = 0.0;
  for (int i = ambient - k; i <= ambient - 1; ++i) s += log_sphere_volume(i);
  for (int i = 0; i <= k - 1; ++i) s -= log_sphere_volume(i);
  return s;
}

double grassmann_volume(int k, int ambient) {
  if (k < 1 || k > ambient) {
    throw std::domain_error("grassmann_volume: need 1 <= k <= ambient dimension");
  }
  if (ambient <= 60) {
    double num = 1.0;
    double den = 1.0;
    for (int i = ambient - k; i <= ambient - 1; ++i) num *= sphere_volume(i);
    for (int i = 0; i <= k - 1; ++i) den *= sphere_volume(i);
    return num / den;
  }
  return std::exp(log_grassmann_volume(k, ambient));
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  return std::lgamma(n + 1.0);
}

GammaHalfBounds gamma_half_bounds(int r) {
  if (r < 1) throw std::domain_error("gamma_half_bounds: need r >= 1");
  const double log_lower =
      0.25 * std::log(static_cast<double>(r)) - 0.5 * (r - 1) * std::log(2.0) +
      0.5 * log_factorial(r - 1);
  const double log_upper = log_lower + 0.5 * std::log(0.5 * kPi);
  return {std::exp(log_lower), std::exp(log_upper), log_lower, log_upper};
}

std::uint64_t binomial_exact(int n, int k) {
  if (n < 0) throw std::domain_error("binomial: negative n");
  if (n > kExactBinomialLimit) throw std::domain_error("binomial_exact: n above 60");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  // c * (n - k + i) is divisible by i and stays below 2^64 for n <= 60
  for (int i = 1; i <= k; ++i) {
    c = c / i * (n - k + i) + c % i * (n - k + i) / i;
  }
  return c;
}

double log_binomial(int n, int k) {
  if (n < 0) throw std::domain_error("binomial: negative n");
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (n <= kExactBinomialLimit) return std::log(static_cast<double>(binomial_exact(n, k)));
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(int n, int k) {
  if (n < 0) throw std::domain_error("binomial: negative n");
  if (k < 0 || k > n) return 0.0;
  if (n <= kExactBinomialLimit) return static_cast<double>(binomial_exact(n, k));
  return std::exp(log_binomial(n, k));
}

}  // namespace capcov
