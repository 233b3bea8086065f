#pragma once

#include "capcov/coeffs.hpp"
#include "capcov/quad.hpp"

#include <optional>

namespace capcov {

/// Prob{C(A) >= 1/eps | A feasible} for A uniform in (S^m)^n, n > m >= 1,
/// eps in (0, 1].
double cond_tail_feasible(int n, int m, double eps, const CoeffTable& coeffs,
                          const QuadSpec& spec = {});

struct TailBound {
  double raw = 0.0;    // the bound as computed
  double value = 0.0;  // min(raw, 1)
  bool clamped = false;
};

/// Upper bound on Prob{C(A) >= 1/eps | A infeasible}; needs n > m + 1 so
/// that infeasible instances have positive probability.
TailBound cond_tail_infeasible_bound(int n, int m, double eps, const CoeffTable& coeffs,
                                     const QuadSpec& spec = {});

struct ExplicitTail {
  std::optional<double> infeasible;  // P: joint probability, infeasible and C >= 1/eps
  std::optional<double> feasible;    // Q: joint probability, feasible and C >= 1/eps
};

/// Elementary bounds on the joint tails, each present only inside its
/// regime: 1/eps >= 13 (m+1)^{3/2} for P and 1/eps >= (m+1)^2 for Q.
ExplicitTail tail_bound_explicit(int n, int m, double eps);

/// 2 ln(m+1) + 3.31
double expected_ln_cond_bound(int m);

/// ln t0 + K/t0: bound on E ln Z for Z >= 1 with Prob{Z >= t} <= K/t, t >= t0.
double expectation_from_tail(double K, double t0);

}  // namespace capcov
