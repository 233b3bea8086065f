#include "capcov/quad.hpp"

#include "capcov/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

namespace capcov {

namespace {

// Kronrod 15-point abscissae and weights with the embedded Gauss 7-point
// weights; xgk[1], xgk[3], xgk[5] and the centre are the Gauss nodes.
constexpr std::array<long double, 8> kXgk = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
constexpr std::array<long double, 8> kWgk = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
constexpr std::array<long double, 4> kWg = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

// Guards memory when an integrand never meets the tolerance.
constexpr std::size_t kMaxSegments = 100000;

template <class Real>
struct Segment {
  Real a;
  Real b;
  Real value;
  Real error;
  int depth;

  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class Real, class F>
Real checked(const F& f, Real x) {
  const Real y = f(x);
  if (std::isnan(y)) {
    std::ostringstream msg;
    msg.precision(21);
    msg << "integrand returned NaN at x = " << x;
    throw QuadratureError(msg.str());
  }
  return y;
}

template <class Real, class F>
Segment<Real> gauss_kronrod(const F& f, Real a, Real b, int depth) {
  const Real centre = (a + b) / 2;
  const Real half = (b - a) / 2;
  const Real fc = checked(f, centre);
  Real kronrod = static_cast<Real>(kWgk[7]) * fc;
  Real gauss = static_cast<Real>(kWg[3]) * fc;
  for (int j = 0; j < 7; ++j) {
    const Real dx = half * static_cast<Real>(kXgk[j]);
    const Real sum = checked(f, centre - dx) + checked(f, centre + dx);
    kronrod += static_cast<Real>(kWgk[j]) * sum;
    if (j % 2 == 1) gauss += static_cast<Real>(kWg[j / 2]) * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

template <class Real>
Real tolerance(const QuadSpec& spec, Real value) {
  return std::max<Real>(spec.rel_tol * std::abs(value), spec.abs_tol);
}

void require_kernel_args(int n, int m, int k, double lo, double hi) {
  if (!(1 <= k && k <= m && m < n)) {
    throw std::domain_error("coverage kernel: need 1 <= k <= m < n");
  }
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
    throw std::domain_error("coverage kernel: need 0 <= lo <= hi <= 1");
  }
}

// exponent * ln(base) with the convention 0 * ln(0) = 0.
double power_term(double exponent, double log_base) {
  return exponent == 0.0 ? 0.0 : exponent * log_base;
}

template <class Real, class F>
BasicQuadResult<Real> integrate_impl(const F& f, Real a, Real b, const QuadSpec& spec) {
  spec.validate();
  if (!(a <= b)) throw std::domain_error("integrate: need a <= b");
  BasicQuadResult<Real> result;
  if (a == b) return result;

  std::priority_queue<Segment<Real>> open;
  std::vector<Segment<Real>> frozen;
  const Segment<Real> first = gauss_kronrod(f, a, b, 0);
  result.evaluations = 15;
  Real value = first.value;
  Real error = first.error;
  open.push(first);
  // Error held by segments that can no longer be split. Refining the rest
  // cannot reduce it, so only the open error drives further work.
  Real frozen_error = 0;

  while (!open.empty() && error - frozen_error > tolerance(spec, value) &&
         open.size() < kMaxSegments) {
    const Segment<Real> worst = open.top();
    open.pop();
    const Real mid = (worst.a + worst.b) / 2;
    // Stop splitting once the outer Kronrod nodes would round onto the
    // segment ends, where an endpoint singularity could be sampled.
    const Real width = worst.b - worst.a;
    const Real scale = std::max(std::abs(worst.a), std::abs(worst.b));
    if (worst.depth >= spec.max_depth || mid <= worst.a || mid >= worst.b ||
        width <= 1024 * std::numeric_limits<Real>::epsilon() * scale) {
      frozen.push_back(worst);
      frozen_error += worst.error;
      continue;
    }
    const Segment<Real> left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
    const Segment<Real> right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
    result.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  std::vector<Segment<Real>> all = std::move(frozen);
  while (!open.empty()) {
    all.push_back(open.top());
    open.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  Real sum = 0;
  Real comp = 0;
  Real err = 0;
  for (const auto& s : all) {
    const Real y = s.value - comp;
    const Real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    err += s.error;
  }
  result.value = sum;
  result.error_estimate = err;
  result.converged = err <= tolerance(spec, sum);
  return result;
}

long double power_term_ext(long double exponent, long double log_base) {
  return exponent == 0 ? 0.0L : exponent * log_base;
}

}  // namespace

void QuadSpec::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadSpec: rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw std::invalid_argument("QuadSpec: abs_tol must be nonnegative");
  if (max_depth < 1) throw std::invalid_argument("QuadSpec: max_depth must be at least 1");
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadSpec& spec) {
  return integrate_impl<double>(f, a, b, spec);
}

QuadResultExt integrate(const IntegrandExt& f, long double a, long double b,
                        const QuadSpec& spec) {
  return integrate_impl<long double>(f, a, b, spec);
}

QuadResult integrate_coverage_kernel_scaled(int n, int m, int k, double lo, double hi,
                                            const QuadSpec& spec) {
  require_kernel_args(n, m, k, lo, hi);
  if (lo == hi) return {};
  const double cos_power = m - k;
  const double lambda_power = n - k - 1;
  const double km = static_cast<double>(k) * m;
  const double log2 = std::log(2.0);

  if (spec.substitute_endpoint || km < 2.0) {
    // t = cos(theta): t^{m-k} (1-t^2)^{km/2-1} dt = cos^{m-k} sin^{km-1} d theta
    auto g = [=](double theta) {
      const double e = power_term(cos_power, std::log(std::cos(theta))) +
                       power_term(km - 1.0, std::log(std::sin(theta))) +
                       power_term(lambda_power, log2 + log_cap_fraction_angle(m, theta));
      return std::exp(e);
    };
    return integrate(g, std::acos(hi), std::acos(lo), spec);
  }
  auto g = [=](double t) {
    const double e = power_term(cos_power, std::log(t)) +
                     power_term(0.5 * km - 1.0, std::log((1.0 - t) * (1.0 + t))) +
                     power_term(lambda_power, log2 + log_cap_fraction(m, t));
    return std::exp(e);
  };
  return integrate(g, lo, hi, spec);
}

QuadResult integrate_coverage_kernel(int n, int m, int k, double lo, double hi,
                                     const QuadSpec& spec) {
  QuadResult r = integrate_coverage_kernel_scaled(n, m, k, lo, hi, spec);
  const int shift = n - k - 1;
  r.value = std::ldexp(r.value, -shift);
  r.error_estimate = std::ldexp(r.error_estimate, -shift);
  return r;
}

QuadResultExt integrate_coverage_kernel_scaled_ext(int n, int m, int k, const QuadSpec& spec) {
  require_kernel_args(n, m, k, 0.0, 1.0);
  const long double cos_power = m - k;
  const long double sin_power = static_cast<long double>(k) * m - 1;
  const long double lambda_power = n - k - 1;
  const long double log2 = std::log(2.0L);
  auto g = [=](long double theta) {
    const long double e =
        power_term_ext(cos_power, std::log(std::cos(theta))) +
        power_term_ext(sin_power, std::log(std::sin(theta))) +
        power_term_ext(lambda_power, log2 + std::log(cap_fraction_angle_ext(m, theta)));
    return std::exp(e);
  };
  return integrate(IntegrandExt(g), 0.0L, std::numbers::pi_v<long double> / 2, spec);
}

QuadResult integrate_infeasible_kernel(int n, int m, double lo, double hi, const QuadSpec& spec) {
  if (!(1 <= m && m < n)) throw std::domain_error("infeasible kernel: need 1 <= m < n");
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
    throw std::domain_error("infeasible kernel: need 0 <= lo <= hi <= 1");
  }
  if (lo == hi) return {};
  const double mm = static_cast<double>(m) * m;
  const double complement_power = n - m - 1;
  constexpr double pi = std::numbers::pi;

  if (spec.substitute_endpoint || mm < 2.0) {
    // (1-t^2)^{(m^2-2)/2} dt = sin^{m^2-1} d theta; 1 - lambda_m(cos theta)
    // is the fraction of the antipodal cap of radius pi - theta.
    auto g = [=](double theta) {
      const double e = power_term(mm - 1.0, std::log(std::sin(theta))) +
                       power_term(complement_power, log_cap_fraction_angle(m, pi - theta));
      return std::exp(e);
    };
    return integrate(g, std::acos(hi), std::acos(lo), spec);
  }
  auto g = [=](double t) {
    const double e = power_term(0.5 * mm - 1.0, std::log((1.0 - t) * (1.0 + t))) +
                     power_term(complement_power, log_cap_fraction(m, -t));
    return std::exp(e);
  };
  return integrate(g, lo, hi, spec);
}

}  // namespace capcov
