#pragma once

#include "capcov/estimate.hpp"
#include "capcov/geom.hpp"

#include <cstdint>
#include <vector>

namespace capcov {

/// Common Monte Carlo controls. Output depends on (trials, seed) only; the
/// worker count affects wall time, not results.
struct McConfig {
  long trials = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  SicOptions sic{};
};

/// Frequency with which n random caps of radius alpha fail to cover S^m.
McEstimate mc_coverage(int n, int m, double alpha, const McConfig& cfg);

/// Frequency with which n random points on S^m are strictly feasible.
McEstimate mc_feasible_fraction(int n, int m, const McConfig& cfg);

struct CondTailsMc {
  std::vector<double> eps;
  std::vector<McEstimate> feasible_tail;    // Prob{C >= 1/eps | feasible}
  std::vector<McEstimate> infeasible_tail;  // Prob{C >= 1/eps | infeasible}
  McEstimate feasible_fraction;
  long feasible = 0;
  long infeasible = 0;
  long ill_posed = 0;  // |t| <= 1e-12, excluded from both classes
};

CondTailsMc mc_condition_tails(int n, int m, const std::vector<double>& eps_grid,
                               const McConfig& cfg);

inline constexpr long kDefaultDrawCap = 10000;

/// Mean number of random caps of radius alpha added until S^m is covered.
/// Trials reaching draw_cap (or the SIC enumeration capacity) are censored
/// at their current count and the estimate is flagged as a lower bound.
McEstimate mc_expected_caps(int m, double alpha, const McConfig& cfg,
                            long draw_cap = kDefaultDrawCap);

/// Mean of ln C(A) over non-ill-posed instances; ci95 is a percentile
/// bootstrap interval over `resamples` resamples.
McEstimate mc_expected_ln_cond(int n, int m, const McConfig& cfg, int resamples = 1000);

/// E|det B|^{m-k+1} for a k x k matrix with rows uniform on S^{k-1}.
McEstimate mc_det_moment(int m, int k, const McConfig& cfg);

/// Closed form of the same moment: (O_m / O_{k-1})^k / G_{k, m+1}.
double det_moment_exact(int m, int k);

}  // namespace capcov
