#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace capcov {

struct QuadSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int max_depth = 60;
  // Integrate the coverage kernels in theta = arccos(t). Always applied
  // when the (1 - t^2) exponent is negative.
  bool substitute_endpoint = true;

  void validate() const;
};

template <class Real>
struct BasicQuadResult {
  Real value = 0;
  Real error_estimate = 0;
  long evaluations = 0;
  bool converged = true;
};

using QuadResult = BasicQuadResult<double>;
using QuadResultExt = BasicQuadResult<long double>;

/// Thrown when the integrand returns NaN; the message carries the abscissa.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Integrand = std::function<double(double)>;
using IntegrandExt = std::function<long double(long double)>;

/// Globally adaptive Gauss-Kronrod (G7/K15) integration over [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// error satisfies max(rel_tol * |value|, abs_tol) or no interval can be split
/// without exceeding max_depth; in the latter case converged is false and the
/// best estimate is returned. Nodes are interior, so integrable endpoint
/// singularities are never evaluated directly.
QuadResult integrate(const Integrand& f, double a, double b, const QuadSpec& spec = {});

/// The same rule carried out in long double.
QuadResultExt integrate(const IntegrandExt& f, long double a, long double b,
                        const QuadSpec& spec = {});

/// int_lo^hi t^{m-k} (1-t^2)^{km/2-1} lambda_m(t)^{n-k-1} dt, for
/// 1 <= k <= m < n and 0 <= lo <= hi <= 1.
QuadResult integrate_coverage_kernel(int n, int m, int k, double lo, double hi,
                                     const QuadSpec& spec = {});

/// Same integral with lambda_m replaced by 2 lambda_m (which is <= 1 on
/// [0, 1]), i.e. the kernel scaled by 2^{n-k-1}. Never underflows for large n.
QuadResult integrate_coverage_kernel_scaled(int n, int m, int k, double lo, double hi,
                                            const QuadSpec& spec = {});

/// Extended-precision evaluation of the scaled kernel over [0, 1]. The
/// coefficient system amplifies relative errors in these integrals by up to
/// ~1e10 at m = 8, beyond what double precision can absorb.
QuadResultExt integrate_coverage_kernel_scaled_ext(int n, int m, int k, const QuadSpec& spec = {});

/// int_lo^hi (1-t^2)^{(m^2-2)/2} (1 - lambda_m(t))^{n-m-1} dt, the kernel of
/// the infeasible-case bounds, for n > m >= 1 and 0 <= lo <= hi <= 1.
QuadResult integrate_infeasible_kernel(int n, int m, double lo, double hi,
                                       const QuadSpec& spec = {});

}  // namespace capcov
