#pragma once

#include <cstdint>

namespace capcov {

/// m-dimensional volume O_m of the unit sphere S^m in R^{m+1}.
double sphere_volume(int m);
double log_sphere_volume(int m);

/// alpha_m = 2 O_{m-1} / O_m, the slope of the cap fraction at t = 0.
double alpha_m(int m);

/// Relative volume lambda_m(t) of a cap of angular radius arccos(t) on S^m.
///
/// Evaluated through the regularized incomplete beta function,
/// lambda_m(t) = I_{1-t^2}(m/2, 1/2) / 2 for t >= 0, and by the
/// complement rule lambda_m(t) = 1 - lambda_m(-t) for t < 0.
/// Throws std::domain_error for m < 1 or t outside [-1, 1].
double cap_fraction(int m, double t);

/// ln lambda_m(t); stays finite where lambda_m(t) underflows a double, down
/// to about 1e-4900.
double log_cap_fraction(int m, double t);

/// lambda_m(cos theta) for theta in [0, pi]. Avoids the cancellation in
/// 1 - t^2 near the pole by working with sin^2(theta) directly.
double cap_fraction_angle(int m, double theta);
double log_cap_fraction_angle(int m, double theta);
long double cap_fraction_angle_ext(int m, long double theta);

/// Oracle path for lambda_m(t): adaptive quadrature of
/// (O_{m-1}/O_m) * int_0^{arccos t} sin^{m-1}(theta) d theta.
double cap_fraction_quadrature(int m, double t);

/// Volume of the Grassmannian G_k(R^{ambient}):
/// O_{ambient-k} ... O_{ambient-1} / (O_0 ... O_{k-1}).
double grassmann_volume(int k, int ambient);
double log_grassmann_volume(int k, int ambient);

struct GammaHalfBounds {
  double lower;
  double upper;
  double log_lower;
  double log_upper;
};

/// Elementary bracket r^{1/4} 2^{-(r-1)/2} sqrt((r-1)!) <= Gamma((r+1)/2)
/// <= sqrt(pi/2) times the same. Computed in log space; lower/upper are
/// +inf when they overflow a double, the log fields are always finite.
GammaHalfBounds gamma_half_bounds(int r);

/// Binomial coefficient. Exact 64-bit arithmetic for n <= 60, log-gamma
/// above. Returns 0 for k < 0 or k > n.
double binomial(int n, int k);
double log_binomial(int n, int k);
std::uint64_t binomial_exact(int n, int k);

double log_factorial(int n);

}  // namespace capcov
