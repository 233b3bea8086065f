#pragma once

#include "capcov/estimate.hpp"
#include "capcov/quad.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace capcov {

enum class Provenance { ClosedForm, LinearSystem, MonteCarlo };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct CoeffEntry {
  int k = 0;
  double value = 0.0;
  Provenance provenance = Provenance::ClosedForm;
  double uncertainty = 0.0;
};

/// C(m, k) for k = 1..m; entries[k - 1] holds k.
struct CoeffTable {
  int m = 0;
  std::vector<CoeffEntry> entries;
  // Linear-system diagnostics (zero for tables built without a solve).
  double condition_estimate = 0.0;
  double residual = 0.0;
  bool degraded = false;

  double operator()(int k) const { return at(k).value; }
  const CoeffEntry& at(int k) const;
};

/// Thrown when a computed coefficient leaves its rigorous bracket.
class BracketViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Known closed forms: k = 1, k = m and (m >= 2) k = m - 1.
std::optional<double> coeff_closed_form(int m, int k);

struct CoeffBounds {
  double lower = 0.0;
  double upper_bracket = 0.0;   // (k+1)^{m-k+1}/2^k * O_{k-1} O_{m-k} / O_m
  double upper_explicit = 0.0;  // volume-free bound in terms of binomials
  double upper = 0.0;           // the tighter of the two
};

CoeffBounds coeff_bounds(int m, int k);

/// I(n,m,k) = 2^{n-1} binom(n,k+1) int_0^1 t^{m-k} (1-t^2)^{km/2-1} lambda_m(t)^{n-k-1} dt.
double coeff_integral_I(int n, int m, int k, const QuadSpec& spec = {});

/// Right-hand side sum_{j=0}^{m} binom(n-1, j) of the identity
/// sum_k I(n,m,k) C(m,k) = 2^{n-1} * Prob{feasible}.
double coeff_identity_rhs(int n, int m);

/// |sum_k I(n,m,k) C(m,k) - rhs| / rhs for the given table.
double coeff_identity_residual(const CoeffTable& table, int n, const QuadSpec& spec = {});

inline constexpr int kDefaultSystemMaxM = 10;
inline constexpr double kDegradedCondition = 1e12;

/// Solves the m x m system over n = m+1..2m. Rows and columns are
/// equilibrated and the solve is done in extended precision. Throws
/// BracketViolation if an entry leaves coeff_bounds, std::domain_error for
/// m outside [1, max_m].
CoeffTable coeff_solve_linear_system(int m, const QuadSpec& spec = {},
                                     int max_m = kDefaultSystemMaxM);

/// Closed forms where known, linear-system values elsewhere.
CoeffTable coeff_table(int m, const QuadSpec& spec = {});

/// Monte Carlo estimate from the centred-simplex moment definition, with
/// k+1 points uniform on S^{k-1}.
McEstimate coeff_monte_carlo(int m, int k, long samples, std::uint64_t seed, int workers = 1);

/// Whether the origin lies in the relative interior of the simplex spanned
/// by the k+1 columns of `points` (k x (k+1)) with full affine dimension:
/// the barycentric system must be consistent (residual < 1e-10) and every
/// coordinate must exceed 1e-12.
bool is_centered(const Eigen::MatrixXd& points);

/// k-volume of the simplex with the given columns, sqrt(det(E^T E)) / k!
/// over the edge vectors E.
double simplex_volume(const Eigen::MatrixXd& points);

std::string coeff_table_csv(const CoeffTable& table, bool header = true);
std::vector<CoeffTable> parse_coeff_csv(const std::string& text);

}  // namespace capcov
