#pragma once

#include "capcov/coeffs.hpp"
#include "capcov/quad.hpp"

#include <stdexcept>

namespace capcov {

/// n caps of angular radius alpha with uniform random centres on S^m.
struct CoverageQuery {
  int n = 0;
  int m = 0;
  double alpha = 0.0;

  /// cos(pi - alpha); nonnegative exactly when alpha >= pi/2.
  double eps() const;
  void validate() const;
};

/// Raised when an assembled probability lands further than 1e-6 outside
/// [0, 1], which indicates an integration or coefficient failure.
class ProbabilityRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kClampLimit = 1e-6;

/// Exact probability that the caps fail to cover S^m, for alpha in [pi/2, pi].
double p_not_covered_exact(const CoverageQuery& q, const CoeffTable& coeffs,
                           const QuadSpec& spec = {});

/// Upper bound on the same probability for alpha in [0, pi/2).
double p_not_covered_bound(const CoverageQuery& q, const CoeffTable& coeffs,
                           const QuadSpec& spec = {});

/// Probability that n uniform points on S^m lie in a common hemisphere:
/// 2^{1-n} sum_{k=0}^{m} binom(n-1, k); equal to 1 for n <= m+1.
double wendel(int n, int m);

/// 1 - wendel(n, m), summed directly over the upper binomial tail.
double wendel_complement(int n, int m);

/// Exact non-coverage probability of n random arcs of angular radius alpha
/// on the circle.
double stevens_exact(int n, double alpha);

struct GilbertBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool valid = true;  // the upper bound degenerates to 0 for n < 2
};

/// Classical bracket of the non-coverage probability on S^2 in terms of the
/// cap area fraction sin^2(alpha/2).
GilbertBounds gilbert_bounds(int n, double alpha);

/// Exact non-coverage probability on S^2 for alpha in [pi/2, pi], by the
/// classical two-integral formula.
double miles_exact(int n, double alpha, const QuadSpec& spec = {});

/// Upper bound on the expected number of caps of radius alpha in (0, pi/2]
/// needed to cover S^m.
double expected_caps_bound(int m, double alpha);

struct SeriesResult {
  double partial_sum = 0.0;
  double tail_bound = 0.0;  // +inf when no finite bound is available
  int terms = 0;
};

/// m + 1 + sum_{n=m+1}^{m+terms} min(1, upper bound on p(n,m,alpha)) and a
/// bound on the remaining terms; E(N) <= partial_sum + tail_bound.
SeriesResult expected_caps_series(int m, double alpha, const CoeffTable& coeffs,
                                  const QuadSpec& spec = {}, int terms = 200);

}  // namespace capcov
