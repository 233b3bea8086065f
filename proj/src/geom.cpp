#include "capcov/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace capcov {

namespace {

constexpr double kWolfeTol = 1e-12;
constexpr int kWolfeMajorCap = 10000;
constexpr long kGilbertCap = 100000;
// Gram determinants below this are treated as linearly dependent blocks.
constexpr double kGramDetFloor = 1e-13;
// Candidate acceptance slack on <a_i, p> >= t and on the convex weights.
constexpr double kIncludeSlack = 1e-10;
constexpr double kWeightSlack = 1e-12;
constexpr double kTieSlack = 1e-12;

double rho_of(double t) { return std::acos(std::clamp(t, -1.0, 1.0)); }

std::vector<int> blocking_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& p, double t) {
  std::vector<int> out;
  const Eigen::VectorXd dots = rows * p;
  for (int i = 0; i < dots.size(); ++i) {
    if (dots(i) - t <= 1e-9) out.push_back(i);
  }
  return out;
}

SicResult make_result(const Instance& inst, Eigen::VectorXd p, double t) {
  SicResult r;
  r.center = std::move(p);
  r.t = t;
  r.rho = rho_of(t);
  r.blocking_set = blocking_rows(inst.rows, r.center, t);
  r.feasibility = classify(t);
  r.condition = r.feasibility == Feasibility::IllPosed ? std::numeric_limits<double>::infinity()
                                                       : 1.0 / std::abs(t);
  return r;
}

// Affine minimum-norm point of the rows listed in S: minimise |sum mu_s P_s|
// subject to sum mu_s = 1 via the bordered (KKT) system.
Eigen::VectorXd affine_min_norm(const Eigen::MatrixXd& gram, const std::vector<int>& S) {
  const int s = static_cast<int>(S.size());
  Eigen::MatrixXd k(s + 1, s + 1);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) k(i, j) = gram(S[i], S[j]);
    k(i, s) = 1.0;
    k(s, i) = 1.0;
  }
  k(s, s) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  rhs(s) = 1.0;
  const Eigen::VectorXd sol = k.fullPivLu().solve(rhs);
  return sol.head(s);
}

MinNormResult gilbert(const Eigen::MatrixXd& points, const Eigen::MatrixXd& gram,
                      Eigen::VectorXd weights) {
  MinNormResult r;
  r.used_fallback = true;
  const double scale = gram.diagonal().maxCoeff();
  Eigen::VectorXd x = points.transpose() * weights;
  for (long it = 0; it < kGilbertCap; ++it) {
    const Eigen::VectorXd v = points * x;
    Eigen::Index j = 0;
    const double vmin = v.minCoeff(&j);
    const double xx = x.squaredNorm();
    r.iterations = static_cast<int>(std::min<long>(it, std::numeric_limits<int>::max()));
    if (xx - vmin <= kWolfeTol * scale) {
      r.converged = true;
      break;
    }
    const Eigen::VectorXd d = points.row(j).transpose() - x;
    const double gamma = std::clamp((xx - vmin) / d.squaredNorm(), 0.0, 1.0);
    x += gamma * d;
    weights *= 1.0 - gamma;
    weights(j) += gamma;
  }
  r.point = x;
  r.weights = weights;
  return r;
}

// Solves G_J w = e for the |J| x |J| block. Returns false for (near-)singular
// blocks.
template <int S>
bool solve_block_fixed(const Eigen::MatrixXd& gram, const int* J, double* w) {
  Eigen::Matrix<double, S, S> g;
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) g(i, j) = gram(J[i], J[j]);
  const double det = g.determinant();
  if (!(det > kGramDetFloor)) return false;
  const Eigen::Matrix<double, S, 1> sol = g.inverse() * Eigen::Matrix<double, S, 1>::Ones();
  for (int i = 0; i < S; ++i) w[i] = sol(i);
  return true;
}

bool solve_block(const Eigen::MatrixXd& gram, const int* J, int s, double* w) {
  switch (s) {
    case 1:
      w[0] = 1.0 / gram(J[0], J[0]);
      return true;
    case 2: return solve_block_fixed<2>(gram, J, w);
    case 3: return solve_block_fixed<3>(gram, J, w);
    case 4: return solve_block_fixed<4>(gram, J, w);
    default: break;
  }
  Eigen::MatrixXd g(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) g(i, j) = gram(J[i], J[j]);
  if (!(g.determinant() > kGramDetFloor)) return false;
  const Eigen::VectorXd sol = g.partialPivLu().solve(Eigen::VectorXd::Ones(s));
  for (int i = 0; i < s; ++i) w[i] = sol(i);
  return true;
}

// Advances J (size s, values < n) to the next combination in lexicographic
// order; false when exhausted.
bool next_combination(std::vector<int>& J, int n) {
  const int s = static_cast<int>(J.size());
  int i = s - 1;
  while (i >= 0 && J[i] == n - s + i) --i;
  if (i < 0) return false;
  ++J[i];
  for (int j = i + 1; j < s; ++j) J[j] = J[j - 1] + 1;
  return true;
}

struct Candidate {
  double t;
  Eigen::VectorXd p;
};

// Visits every candidate cap with a nonzero cosine: for each linearly
// independent subset J of at most m+1 rows, the cap through a_J centred in
// span(a_J), of either orientation, that includes every row and whose t p lies
// in conv(a_J). Subsets with e^T w < min_sum (i.e. |t| too large) are
// skipped before the inclusion test. The visitor returns true to stop.
template <class Visit>
long enumerate_nonzero(const Instance& inst, const Eigen::MatrixXd& gram, double min_sum,
                       bool want_positive, Visit&& visit) {
  const int n = inst.n();
  const int smax = std::min(inst.m() + 1, n);
  long skipped = 0;
  std::vector<double> w(smax);
  for (int s = 1; s <= smax; ++s) {
    std::vector<int> J(s);
    std::iota(J.begin(), J.end(), 0);
    do {
      if (!solve_block(gram, J.data(), s, w.data())) {
        ++skipped;
        continue;
      }
      double sum = 0.0;
      bool nonneg = true;
      for (int i = 0; i < s; ++i) {
        sum += w[i];
        nonneg = nonneg && w[i] >= -kWeightSlack;
      }
      if (!nonneg || !(sum > 0.0) || sum < min_sum) continue;
      const double tabs = 1.0 / std::sqrt(sum);
      // q_i = sum_j G_{i,J_j} w_j, so <a_i, p> = t q_i.
      bool neg_ok = true;
      bool pos_ok = want_positive;
      for (int i = 0; i < n && (neg_ok || pos_ok); ++i) {
        double q = 0.0;
        for (int j = 0; j < s; ++j) q += gram(i, J[j]) * w[j];
        if (q > 1.0 + kIncludeSlack / tabs) neg_ok = false;
        if (q < 1.0 - kIncludeSlack / tabs) pos_ok = false;
      }
      if (!neg_ok && !pos_ok) continue;
      Eigen::VectorXd p = Eigen::VectorXd::Zero(inst.m() + 1);
      for (int j = 0; j < s; ++j) p += w[j] * inst.rows.row(J[j]).transpose();
      p *= tabs;
      if (pos_ok && visit(Candidate{tabs, p})) return skipped;
      if (neg_ok && visit(Candidate{-tabs, -p})) return skipped;
    } while (next_combination(J, n));
  }
  return skipped;
}

// Candidates with t = 0: normals of hyperplanes spanned by m independent rows
// (or any null vector of A when rank(A) <= m) that keep every row in the closed
// half-space and have 0 in the hull of the rows on the hyperplane.
template <class Visit>
void enumerate_zero(const Instance& inst, Visit&& visit) {
  const int n = inst.n();
  const int m = inst.m();
  auto consider = [&](const Eigen::VectorXd& normal) {
    for (double sign : {1.0, -1.0}) {
      const Eigen::VectorXd p = sign * normal.normalized();
      const Eigen::VectorXd dots = inst.rows * p;
      if (dots.minCoeff() < -kIncludeSlack) continue;
      std::vector<int> on;
      for (int i = 0; i < n; ++i)
        if (std::abs(dots(i)) <= 1e-9) on.push_back(i);
      if (on.empty()) continue;
      Eigen::MatrixXd sub(on.size(), m + 1);
      for (std::size_t i = 0; i < on.size(); ++i) sub.row(i) = inst.rows.row(on[i]);
      if (min_norm_point(sub).point.norm() > 1e-8) continue;
      if (visit(Candidate{0.0, p})) return true;
    }
    return false;
  };

  Eigen::FullPivLU<Eigen::MatrixXd> full(inst.rows);
  if (full.rank() <= m) {
    const Eigen::MatrixXd ker = full.kernel();
    if (consider(ker.col(0))) return;
  }
  if (m > n) return;
  std::vector<int> J(m);
  std::iota(J.begin(), J.end(), 0);
  do {
    Eigen::MatrixXd sub(m, m + 1);
    for (int i = 0; i < m; ++i) sub.row(i) = inst.rows.row(J[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.rank() < m) continue;
    if (consider(lu.kernel().col(0))) return;
  } while (next_combination(J, n));
}

void require_cap(const Instance& inst, const SicOptions& opts) {
  if (inst.n() > opts.enumeration_cap) {
    throw std::length_error("SIC enumeration: n=" + std::to_string(inst.n()) +
                            " exceeds the enumeration cap " +
                            std::to_string(opts.enumeration_cap));
  }
}

}  // namespace

void Instance::validate() const {
  if (rows.rows() < 1) throw std::invalid_argument("instance: need at least one row");
  if (rows.cols() < 2) throw std::invalid_argument("instance: need m >= 1 (at least 2 columns)");
  for (int i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (!(std::abs(norm - 1.0) <= 1e-12)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "instance: row " << i << " has norm " << norm << ", expected 1";
      throw std::invalid_argument(msg.str());
    }
  }
}

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::StrictlyFeasible: return "strictly-feasible";
    case Feasibility::IllPosed: return "ill-posed";
    case Feasibility::Infeasible: return "infeasible";
  }
  return "unknown";
}

Feasibility classify(double t) {
  if (t > kIllPosedBand) return Feasibility::StrictlyFeasible;
  if (t < -kIllPosedBand) return Feasibility::Infeasible;
  return Feasibility::IllPosed;
}

Instance sample_uniform_sphere(int m, int n, Rng& rng) {
  if (m < 1 || n < 1) throw std::domain_error("sample_uniform_sphere: need m >= 1, n >= 1");
  Instance inst;
  inst.rows.resize(n, m + 1);
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    do {
      for (int j = 0; j <= m; ++j) inst.rows(i, j) = rng.normal();
      norm2 = inst.rows.row(i).squaredNorm();
    } while (norm2 == 0.0);
    inst.rows.row(i) /= std::sqrt(norm2);
  }
  return inst;
}

Instance sample_uniform_sphere(int m, int n, std::uint64_t seed) {
  Rng rng(seed, 0);
  return sample_uniform_sphere(m, n, rng);
}

MinNormResult min_norm_point(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw std::invalid_argument("min_norm_point: no points");
  const Eigen::MatrixXd gram = points * points.transpose();
  const double scale = gram.diagonal().maxCoeff();

  Eigen::Index start = 0;
  gram.diagonal().minCoeff(&start);
  std::vector<int> S{static_cast<int>(start)};
  std::vector<double> lambda{1.0};
  Eigen::VectorXd x = points.row(start).transpose();

  MinNormResult r;
  bool stalled = false;
  for (int major = 0; major < kWolfeMajorCap; ++major) {
    r.iterations = major;
    const Eigen::VectorXd v = points * x;
    Eigen::Index j = 0;
    const double vmin = v.minCoeff(&j);
    const double xx = x.squaredNorm();
    if (xx - vmin <= kWolfeTol * scale || xx <= kWolfeTol * scale) {
      r.converged = true;
      break;
    }
    if (std::find(S.begin(), S.end(), static_cast<int>(j)) != S.end()) {
      stalled = true;
      break;
    }
    S.push_back(static_cast<int>(j));
    lambda.push_back(0.0);

    for (int minor = 0; minor <= n + 1; ++minor) {
      const Eigen::VectorXd mu = affine_min_norm(gram, S);
      if ((mu.array() > 0.0).all()) {
        lambda.assign(mu.data(), mu.data() + mu.size());
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < S.size(); ++i) {
        if (mu(i) <= 0.0) theta = std::min(theta, lambda[i] / (lambda[i] - mu(i)));
      }
      std::vector<int> keepS;
      std::vector<double> keepL;
      for (std::size_t i = 0; i < S.size(); ++i) {
        const double li = lambda[i] + theta * (mu(i) - lambda[i]);
        if (li > 1e-15) {
          keepS.push_back(S[i]);
          keepL.push_back(li);
        }
      }
      if (keepS.empty()) {
        stalled = true;
        break;
      }
      S = std::move(keepS);
      lambda = std::move(keepL);
    }
    if (stalled) break;
    const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    x.setZero(points.cols());
    for (std::size_t i = 0; i < S.size(); ++i) {
      lambda[i] /= total;
      x += lambda[i] * points.row(S[i]).transpose();
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < S.size(); ++i) weights(S[i]) = lambda[i];
  if (r.converged) {
    r.point = x;
    r.weights = weights;
    return r;
  }
  (void)stalled;
  return gilbert(points, gram, weights);
}

std::optional<SicResult> sic_feasible(const Instance& inst) {
  inst.validate();
  const MinNormResult mn = min_norm_point(inst.rows);
  if (!mn.converged) {
    std::ostringstream msg;
    msg << "minimum-norm solver did not converge; best norm " << mn.point.norm();
    throw SolverError(msg.str());
  }
  const double norm = mn.point.norm();
  if (norm <= kIllPosedBand) return std::nullopt;
  Eigen::VectorXd p = mn.point / norm;
  const double t = (inst.rows * p).minCoeff();
  return make_result(inst, std::move(p), t);
}

SicResult sic_enumerate(const Instance& inst, const SicOptions& opts) {
  inst.validate();
  require_cap(inst, opts);
  const Eigen::MatrixXd gram = inst.rows * inst.rows.transpose();
  std::vector<Candidate> found;
  double best = -std::numeric_limits<double>::infinity();
  auto keep = [&](Candidate c) {
    if (c.t >= best - kTieSlack) {
      best = std::max(best, c.t);
      found.push_back(std::move(c));
    }
    return false;
  };
  const long skipped = enumerate_nonzero(inst, gram, 0.0, true, keep);
  if (best < kIllPosedBand) enumerate_zero(inst, keep);
  if (found.empty()) throw SolverError("SIC enumeration produced no valid candidate");

  SicResult out;
  bool have = false;
  for (const auto& c : found) {
    if (c.t < best - kTieSlack) continue;
    // Large weights near t = 0 cost digits in p; renormalise and take t as
    // the smallest inner product, which is the cap's own definition.
    const Eigen::VectorXd p = c.p.normalized();
    SicResult r = make_result(inst, p, (inst.rows * p).minCoeff());
    if (!have || r.blocking_set < out.blocking_set) {
      out = std::move(r);
      have = true;
    }
  }
  out.skipped_singular = skipped;
  return out;
}

SicResult sic_general(const Instance& inst, const SicOptions& opts) {
  if (auto r = sic_feasible(inst)) return *r;
  return sic_enumerate(inst, opts);
}

bool covers_sphere(const Instance& inst, double alpha, const SicOptions& opts) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) throw std::domain_error("covers_sphere: alpha outside [0, pi]");
  inst.validate();
  const double c = std::cos(alpha);
  const double threshold = -c;  // covered iff t < threshold
  const MinNormResult mn = min_norm_point(inst.rows);
  if (!mn.converged) throw SolverError("covers_sphere: minimum-norm solver did not converge");
  const double norm = mn.point.norm();
  if (norm > kIllPosedBand) {
    const double t = (inst.rows * (mn.point / norm)).minCoeff();
    return t < threshold;
  }
  // Not strictly feasible: t <= kIllPosedBand.
  if (threshold > kIllPosedBand) return true;
  // At alpha = pi/2 (within the band) the boundary case t = 0 has measure zero.
  if (std::abs(c) <= kIllPosedBand) return true;
  require_cap(inst, opts);
  // Remaining case: alpha < pi/2 and the instance is not strictly feasible;
  // look for an including cap with t >= -cos(alpha), i.e. e^T w >= 1/c^2.
  const Eigen::MatrixXd gram = inst.rows * inst.rows.transpose();
  bool uncovered = false;
  auto stop = [&](const Candidate& cand) {
    if (cand.t >= threshold) uncovered = true;
    return uncovered;
  };
  enumerate_nonzero(inst, gram, 1.0 / (c * c), false, stop);
  if (!uncovered) enumerate_zero(inst, stop);
  return !uncovered;
}

CertificateReport verify_sic(const Instance& inst, const SicResult& sic) {
  CertificateReport rep;
  std::ostringstream why;
  const int d = inst.m() + 1;
  if (sic.center.size() != d) {
    rep.ok = false;
    rep.message = "centre has wrong dimension";
    return rep;
  }
  if (std::abs(sic.center.norm() - 1.0) > 1e-9) {
    rep.ok = false;
    why << "centre not unit; ";
  }
  const Eigen::VectorXd dots = inst.rows * sic.center;
  rep.inclusion_violation = std::max(0.0, sic.t - dots.minCoeff());
  if (rep.inclusion_violation > 1e-9) {
    rep.ok = false;
    why << "row outside cap by " << rep.inclusion_violation << "; ";
  }
  if (sic.blocking_set.empty()) {
    rep.ok = false;
    why << "empty blocking set; ";
  }
  for (int i : sic.blocking_set) {
    if (i < 0 || i >= inst.n()) {
      rep.ok = false;
      rep.message = "blocking index out of range";
      return rep;
    }
    rep.blocking_gap = std::max(rep.blocking_gap, std::abs(dots(i) - sic.t));
  }
  if (rep.blocking_gap > 1e-9) {
    rep.ok = false;
    why << "blocking row off the boundary by " << rep.blocking_gap << "; ";
  }
  if (classify(sic.t) != sic.feasibility) {
    rep.ok = false;
    why << "feasibility class inconsistent with t; ";
  }

  // t p in conv(blocking rows): try every subset of at most d+1 rows
  // (Caratheodory) and solve for affine weights by least squares.
  const Eigen::VectorXd target = sic.t * sic.center;
  const int b = static_cast<int>(sic.blocking_set.size());
  double best = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= std::min(b, d + 1) && best > 1e-8; ++s) {
    std::vector<int> J(s);
    std::iota(J.begin(), J.end(), 0);
    do {
      Eigen::MatrixXd sys(d + 1, s);
      for (int j = 0; j < s; ++j) {
        sys.col(j).head(d) = inst.rows.row(sic.blocking_set[J[j]]).transpose();
        sys(d, j) = 1.0;
      }
      Eigen::VectorXd rhs(d + 1);
      rhs.head(d) = target;
      rhs(d) = 1.0;
      const Eigen::VectorXd mu = sys.colPivHouseholderQr().solve(rhs);
      if ((mu.array() < -1e-10).any()) continue;
      best = std::min(best, (sys * mu - rhs).norm());
    } while (best > 1e-8 && next_combination(J, b));
  }
  rep.hull_distance = best;
  if (!(best <= 1e-8)) {
    rep.ok = false;
    why << "t p not in the hull of the blocking rows (residual " << best << "); ";
  }
  rep.message = why.str();
  return rep;
}

}  // namespace capcov
