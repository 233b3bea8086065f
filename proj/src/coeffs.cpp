#include "capcov/coeffs.hpp"

#include "capcov/random.hpp"
#include "capcov/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace capcov {

namespace {

void require_pair(int m, int k) {
  if (m < 1 || k < 1 || k > m) {
    throw std::domain_error("coefficient index out of range: need 1 <= k <= m (m=" +
                            std::to_string(m) + ", k=" + std::to_string(k) + ")");
  }
}

// ln(O_{k-1} O_{m-k} / O_m)
double log_volume_ratio(int m, int k) {
  return log_sphere_volume(k - 1) + log_sphere_volume(m - k) - log_sphere_volume(m);
}

// Relative slack for bracket checks; C(m, m) sits exactly on both ends.
constexpr double kBracketSlack = 1e-6;

// The I(n,m,k) integrals can be as small as 1e-8, so an absolute floor
// would cap their relative accuracy; only the relative tolerance applies.
QuadSpec relative_only(QuadSpec spec) {
  spec.abs_tol = 0.0;
  return spec;
}

// Entry errors are amplified by ~1e10 at m = 8, so the system integrals are
// always driven to long double precision.
constexpr double kSystemRelTol = 1e-18;

QuadSpec system_spec(QuadSpec spec) {
  spec.abs_tol = 0.0;
  spec.rel_tol = std::min(spec.rel_tol, kSystemRelTol);
  return spec;
}

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::LinearSystem: return "linear-system";
    case Provenance::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "closed-form") return Provenance::ClosedForm;
  if (s == "linear-system") return Provenance::LinearSystem;
  if (s == "monte-carlo") return Provenance::MonteCarlo;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

const CoeffEntry& CoeffTable::at(int k) const {
  if (k < 1 || k > static_cast<int>(entries.size())) {
    throw std::domain_error("CoeffTable: k=" + std::to_string(k) + " outside 1.." +
                            std::to_string(entries.size()));
  }
  return entries[k - 1];
}

std::optional<double> coeff_closed_form(int m, int k) {
  require_pair(m, k);
  const double a = alpha_m(m);
  if (k == m) return (m + 1) * std::ldexp(a, -m);
  if (k == 1) return std::ldexp(a, m - 1);
  if (k == m - 1) return m * (m - 1.0) * std::ldexp(1.0 + a * a, -(m - 1));
  return std::nullopt;
}

CoeffBounds coeff_bounds(int m, int k) {
  require_pair(m, k);
  const double ln2 = std::numbers::ln2;
  const double lr = log_volume_ratio(m, k);
  const double lk1 = std::log(k + 1.0);
  CoeffBounds b;
  b.lower = std::exp(lk1 - k * ln2 + lr);
  b.upper_bracket = std::exp((m - k + 1) * lk1 - k * ln2 + lr);
  if (k < m) {
    b.upper_explicit = std::exp(0.5 * std::log(0.5 * std::numbers::pi) + (m - k + 1) * lk1 -
                                k * ln2 + 0.75 * std::log(static_cast<double>(k)) +
                                0.5 * log_binomial(m, k));
  } else {
    b.upper_explicit = std::exp(std::log(m + 1.0) + 0.5 * std::log(static_cast<double>(m)) -
                                m * ln2);
  }
  b.upper = std::min(b.upper_bracket, b.upper_explicit);
  return b;
}

double coeff_integral_I(int n, int m, int k, const QuadSpec& spec) {
  const QuadResult r = integrate_coverage_kernel_scaled(n, m, k, 0.0, 1.0, relative_only(spec));
  // 2^{n-1} * 2^{-(n-k-1)} = 2^k
  return std::exp(k * std::numbers::ln2 + log_binomial(n, k + 1) + std::log(r.value));
}

double coeff_identity_rhs(int n, int m) {
  double s = 0.0;
  for (int j = 0; j <= std::min(m, n - 1); ++j) s += binomial(n - 1, j);
  return s;
}

double coeff_identity_residual(const CoeffTable& table, int n, const QuadSpec& spec) {
  const int m = table.m;
  long double lhs = 0.0L;
  for (int k = 1; k <= m; ++k) {
    lhs += static_cast<long double>(coeff_integral_I(n, m, k, spec)) * table(k);
  }
  const double rhs = coeff_identity_rhs(n, m);
  return static_cast<double>(std::abs(lhs - rhs) / rhs);
}

CoeffTable coeff_solve_linear_system(int m, const QuadSpec& spec, int max_m) {
  if (m < 1 || m > max_m) {
    throw std::domain_error("linear system: m=" + std::to_string(m) + " outside 1.." +
                            std::to_string(max_m));
  }
  LMatrix a(m, m);
  LVector b(m);
  const QuadSpec ext = system_spec(spec);
  long double quad_rel_err = std::numeric_limits<long double>::epsilon();
  for (int i = 0; i < m; ++i) {
    const int n = m + 1 + i;
    b(i) = coeff_identity_rhs(n, m);
    for (int k = 1; k <= m; ++k) {
      const QuadResultExt r = integrate_coverage_kernel_scaled_ext(n, m, k, ext);
      quad_rel_err = std::max(quad_rel_err, r.error_estimate / std::abs(r.value));
      a(i, k - 1) = std::ldexp(static_cast<long double>(binomial(n, k + 1)), k) * r.value;
    }
  }

  // Equilibrate: rows by their right-hand side, then columns by their largest entry.
  LVector row_scale = b.cwiseInverse();
  LMatrix scaled = row_scale.asDiagonal() * a;
  LVector col_scale(m);
  for (int j = 0; j < m; ++j) col_scale(j) = 1.0L / scaled.col(j).cwiseAbs().maxCoeff();
  scaled = scaled * col_scale.asDiagonal();
  const LVector rhs = row_scale.cwiseProduct(b);

  Eigen::PartialPivLU<LMatrix> lu(scaled);
  LVector y = lu.solve(rhs);
  for (int pass = 0; pass < 3; ++pass) y += lu.solve(rhs - scaled * y);
  const LVector x = col_scale.cwiseProduct(y);

  const Eigen::MatrixXd sd = scaled.cast<double>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sd);
  const auto& sv = svd.singularValues();
  const double cond = sv(m - 1) > 0.0 ? sv(0) / sv(m - 1) : std::numeric_limits<double>::infinity();

  CoeffTable t;
  t.m = m;
  t.condition_estimate = cond;
  t.residual = static_cast<double>((a * x - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff());
  t.degraded = !(cond <= kDegradedCondition) || !(t.residual <= 1e-8);
  for (int k = 1; k <= m; ++k) {
    const double v = static_cast<double>(x(k - 1));
    CoeffEntry e{k, v, Provenance::LinearSystem, std::abs(v) * cond * static_cast<double>(quad_rel_err)};
    const CoeffBounds bd = coeff_bounds(m, k);
    if (!(v >= bd.lower * (1.0 - kBracketSlack) && v <= bd.upper * (1.0 + kBracketSlack))) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "C(" << m << "," << k << ") = " << v << " outside [" << bd.lower << ", " << bd.upper
          << "]";
      throw BracketViolation(msg.str());
    }
    t.entries.push_back(e);
  }
  return t;
}

CoeffTable coeff_table(int m, const QuadSpec& spec) {
  bool all_closed = true;
  for (int k = 1; k <= m; ++k) all_closed = all_closed && coeff_closed_form(m, k).has_value();
  CoeffTable t;
  if (!all_closed) t = coeff_solve_linear_system(m, spec);
  t.m = m;
  t.entries.resize(m);
  for (int k = 1; k <= m; ++k) {
    if (auto c = coeff_closed_form(m, k)) t.entries[k - 1] = {k, *c, Provenance::ClosedForm, 0.0};
  }
  return t;
}

double simplex_volume(const Eigen::MatrixXd& points) {
  const int k = static_cast<int>(points.cols()) - 1;
  if (k < 1) return 0.0;
  Eigen::MatrixXd edges(points.rows(), k);
  for (int j = 0; j < k; ++j) edges.col(j) = points.col(j + 1) - points.col(0);
  const double g = (edges.transpose() * edges).determinant();
  return std::sqrt(std::max(g, 0.0)) / std::exp(log_factorial(k));
}

bool is_centered(const Eigen::MatrixXd& points) {
  const Eigen::Index k = points.rows();
  const Eigen::Index count = points.cols();
  Eigen::MatrixXd sys(k + 1, count);
  sys.topRows(k) = points;
  sys.row(k).setOnes();
  Eigen::VectorXd target = Eigen::VectorXd::Zero(k + 1);
  target(k) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys);
  if (cod.rank() < std::min(k + 1, count)) return false;
  const Eigen::VectorXd mu = cod.solve(target);
  if ((sys * mu - target).norm() >= 1e-10) return false;
  return (mu.array() > 1e-12).all();
}

McEstimate coeff_monte_carlo(int m, int k, long samples, std::uint64_t seed, int workers) {
  require_pair(m, k);
  if (samples < 1) throw std::domain_error("coeff_monte_carlo: need samples >= 1");
  const int power = m - k + 1;
  const double log_const = power * log_factorial(k) - k * log_sphere_volume(m) +
                           log_grassmann_volume(k, m) + (k + 1) * log_sphere_volume(k - 1);
  const double scale = std::exp(log_const);

  const long chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<Moments> parts(chunks);
  std::vector<long> hit_counts(chunks, 0);
  for_each_chunk(samples, workers, [&](long c, long begin, long end) {
    Rng rng(seed, static_cast<std::uint64_t>(c));
    Eigen::MatrixXd pts(k, k + 1);
    for (long i = begin; i < end; ++i) {
      for (int j = 0; j <= k; ++j) {
        double norm2 = 0.0;
        do {
          for (int r = 0; r < k; ++r) pts(r, j) = rng.normal();
          norm2 = pts.col(j).squaredNorm();
        } while (norm2 == 0.0);
        pts.col(j) /= std::sqrt(norm2);
      }
      double x = 0.0;
      if (is_centered(pts)) {
        x = scale * std::pow(simplex_volume(pts), power);
        ++hit_counts[c];
      }
      parts[c].add(x);
    }
  });
  Moments total;
  long hits = 0;
  for (long c = 0; c < chunks; ++c) {
    total.merge(parts[c]);
    hits += hit_counts[c];
  }
  McEstimate e = make_estimate(total, seed);
  if (hits == 0) {
    e.std_error = std::numeric_limits<double>::infinity();
    e.ci95 = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  return e;
}

std::string coeff_table_csv(const CoeffTable& table, bool header) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (header) out << "m,k,value,provenance,uncertainty\n";
  for (const auto& e : table.entries) {
    out << table.m << ',' << e.k << ',' << e.value << ',' << to_string(e.provenance) << ','
        << e.uncertainty << '\n';
  }
  return out.str();
}

std::vector<CoeffTable> parse_coeff_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<int, std::map<int, CoeffEntry>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("#", 0) == 0 || line.rfind("m,k", 0) == 0) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 5) {
      throw std::invalid_argument("coefficient CSV line " + std::to_string(lineno) +
                                  ": expected 5 fields");
    }
    CoeffEntry e{std::stoi(f[1]), std::stod(f[2]), provenance_from_string(f[3]), std::stod(f[4])};
    rows[std::stoi(f[0])][e.k] = e;
  }
  std::vector<CoeffTable> tables;
  for (auto& [m, entries] : rows) {
    CoeffTable t;
    t.m = m;
    for (int k = 1; k <= m; ++k) {
      auto it = entries.find(k);
      if (it == entries.end()) {
        throw std::invalid_argument("coefficient CSV: m=" + std::to_string(m) + " lacks k=" +
                                    std::to_string(k));
      }
      t.entries.push_back(it->second);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

}  // namespace capcov
