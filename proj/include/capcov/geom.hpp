#pragma once

#include "capcov/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace capcov {

/// n unit vectors in R^{m+1}, one per row.
struct Instance {
  Eigen::MatrixXd rows;

  int m() const { return static_cast<int>(rows.cols()) - 1; }
  int n() const { return static_cast<int>(rows.rows()); }
  /// Throws std::invalid_argument unless n >= 1, m >= 1 and every row has
  /// unit norm within 1e-12.
  void validate() const;
};

enum class Feasibility { StrictlyFeasible, IllPosed, Infeasible };

std::string to_string(Feasibility f);

/// Band around t = 0 treated as ill-posed.
inline constexpr double kIllPosedBand = 1e-9;

/// Smallest including cap: centre p, cosine t of the radius, and the rows on
/// its boundary.
struct SicResult {
  Eigen::VectorXd center;
  double t = 0.0;
  double rho = 0.0;
  std::vector<int> blocking_set;  // zero-based row indices, ascending
  Feasibility feasibility = Feasibility::IllPosed;
  double condition = 0.0;  // 1/|t|, +inf when ill-posed
  long skipped_singular = 0;
};

Feasibility classify(double t);

Instance sample_uniform_sphere(int m, int n, std::uint64_t seed);
Instance sample_uniform_sphere(int m, int n, Rng& rng);

struct MinNormResult {
  Eigen::VectorXd point;
  Eigen::VectorXd weights;  // convex weights, one per row
  int iterations = 0;
  bool converged = false;
  bool used_fallback = false;
};

/// Minimum-norm point of the convex hull of the rows of `points` by Wolfe's
/// active-set method, with a Frank-Wolfe (Gilbert) fallback.
MinNormResult min_norm_point(const Eigen::MatrixXd& points);

/// Class of errors raised when a solver cannot produce a certified answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SIC of a strictly feasible instance via the minimum-norm point of
/// conv{a_i}; empty when that point has norm <= kIllPosedBand.
std::optional<SicResult> sic_feasible(const Instance& inst);

struct SicOptions {
  int enumeration_cap = 25;
};

/// SIC of any instance. Uses sic_feasible when it applies, otherwise
/// enumerates candidate blocking sets. Throws std::length_error when n
/// exceeds the enumeration cap.
SicResult sic_general(const Instance& inst, const SicOptions& opts = {});

/// Candidate enumeration alone, without the convex shortcut.
SicResult sic_enumerate(const Instance& inst, const SicOptions& opts = {});

/// Whether the closed caps of angular radius alpha centred at the rows
/// cover S^m, i.e. t(A) < -cos(alpha).
bool covers_sphere(const Instance& inst, double alpha, const SicOptions& opts = {});

struct CertificateReport {
  bool ok = true;
  double inclusion_violation = 0.0;  // max(t - <a_i, p>, 0)
  double blocking_gap = 0.0;         // max |<a_i, p> - t| over the blocking set
  double hull_distance = 0.0;        // distance of t p to conv(blocking set)
  std::string message;
};

/// Independent post-hoc check of a SicResult: inclusion within 1e-9,
/// blocking rows on the boundary within 1e-9, |p| = 1, class consistent with
/// t, and t p in the convex hull of the blocking rows within 1e-8.
CertificateReport verify_sic(const Instance& inst, const SicResult& sic);

}  // namespace capcov
