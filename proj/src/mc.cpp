#include "capcov/mc.hpp"

#include "capcov/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace capcov {

namespace {

constexpr double kMcIllPosed = 1e-12;
// Stream reserved for bootstrap resampling, far above any chunk index.
constexpr std::uint64_t kBootstrapStream = 0xB0075790ULL << 20;

long chunk_count(long trials) { return (trials + kChunkSize - 1) / kChunkSize; }

void require_trials(const McConfig& cfg) {
  if (cfg.trials < 1) throw std::domain_error("Monte Carlo: need trials >= 1");
}

// Runs per_trial(rng, counts) for every trial, with one counter vector per
// chunk, and returns the chunk-ordered sum.
template <class F>
std::vector<long> count_trials(const McConfig& cfg, int slots, F&& per_trial) {
  const long chunks = chunk_count(cfg.trials);
  std::vector<std::vector<long>> parts(chunks, std::vector<long>(slots, 0));
  for_each_chunk(cfg.trials, cfg.workers, [&](long c, long begin, long end) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) per_trial(rng, parts[c]);
  });
  std::vector<long> total(slots, 0);
  for (const auto& p : parts)
    for (int s = 0; s < slots; ++s) total[s] += p[s];
  return total;
}

}  // namespace

McEstimate mc_coverage(int n, int m, double alpha, const McConfig& cfg) {
  require_trials(cfg);
  if (n < 1 || m < 1) throw std::domain_error("mc_coverage: need n, m >= 1");
  const auto counts = count_trials(cfg, 1, [&](Rng& rng, std::vector<long>& c) {
    const Instance inst = sample_uniform_sphere(m, n, rng);
    if (!covers_sphere(inst, alpha, cfg.sic)) ++c[0];
  });
  return make_frequency(counts[0], cfg.trials, cfg.seed);
}

McEstimate mc_feasible_fraction(int n, int m, const McConfig& cfg) {
  require_trials(cfg);
  const auto counts = count_trials(cfg, 1, [&](Rng& rng, std::vector<long>& c) {
    const Instance inst = sample_uniform_sphere(m, n, rng);
    if (sic_feasible(inst)) ++c[0];
  });
  return make_frequency(counts[0], cfg.trials, cfg.seed);
}

CondTailsMc mc_condition_tails(int n, int m, const std::vector<double>& eps_grid,
                               const McConfig& cfg) {
  require_trials(cfg);
  for (double e : eps_grid) {
    if (!(e > 0.0 && e <= 1.0)) throw std::domain_error("mc_condition_tails: eps outside (0, 1]");
  }
  const int g = static_cast<int>(eps_grid.size());
  // slots: [feasible, infeasible, ill-posed, feasible hits per eps..., infeasible hits per eps...]
  const auto counts = count_trials(cfg, 3 + 2 * g, [&](Rng& rng, std::vector<long>& c) {
    const Instance inst = sample_uniform_sphere(m, n, rng);
    const SicResult sic = sic_general(inst, cfg.sic);
    const double at = std::abs(sic.t);
    if (at <= kMcIllPosed) {
      ++c[2];
      return;
    }
    const bool feasible = sic.t > 0.0;
    ++c[feasible ? 0 : 1];
    // C >= 1/eps  <=>  |t| <= eps
    for (int j = 0; j < g; ++j) {
      if (at <= eps_grid[j]) ++c[(feasible ? 3 : 3 + g) + j];
    }
  });
  CondTailsMc out;
  out.eps = eps_grid;
  out.feasible = counts[0];
  out.infeasible = counts[1];
  out.ill_posed = counts[2];
  out.feasible_fraction = make_frequency(counts[0], cfg.trials, cfg.seed);
  out.feasible_fraction.excluded = counts[2];
  for (int j = 0; j < g; ++j) {
    out.feasible_tail.push_back(make_frequency(counts[3 + j], counts[0], cfg.seed));
    out.infeasible_tail.push_back(make_frequency(counts[3 + g + j], counts[1], cfg.seed));
  }
  return out;
}

McEstimate mc_expected_caps(int m, double alpha, const McConfig& cfg, long draw_cap) {
  require_trials(cfg);
  if (m < 1) throw std::domain_error("mc_expected_caps: need m >= 1");
  if (!(alpha > 0.0 && alpha <= 0.5 * std::numbers::pi)) {
    throw std::domain_error("mc_expected_caps: alpha outside (0, pi/2]");
  }
  if (draw_cap < 1) throw std::domain_error("mc_expected_caps: need draw_cap >= 1");
  const long chunks = chunk_count(cfg.trials);
  std::vector<Moments> parts(chunks);
  std::vector<long> censored(chunks, 0);
  for_each_chunk(cfg.trials, cfg.workers, [&](long c, long begin, long end) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) {
      Instance inst;
      inst.rows.resize(0, m + 1);
      long count = 0;
      bool covered = false;
      while (!covered && count < draw_cap) {
        const Instance one = sample_uniform_sphere(m, 1, rng);
        inst.rows.conservativeResize(count + 1, Eigen::NoChange);
        inst.rows.row(count) = one.rows.row(0);
        ++count;
        try {
          covered = covers_sphere(inst, alpha, cfg.sic);
        } catch (const std::length_error&) {
          break;
        }
      }
      if (!covered) ++censored[c];
      parts[c].add(static_cast<double>(count));
    }
  });
  Moments total;
  long cens = 0;
  for (long c = 0; c < chunks; ++c) {
    total.merge(parts[c]);
    cens += censored[c];
  }
  McEstimate e = make_estimate(total, cfg.seed);
  e.censored = cens;
  e.lower_bound = cens > 0;
  return e;
}

McEstimate mc_expected_ln_cond(int n, int m, const McConfig& cfg, int resamples) {
  require_trials(cfg);
  if (resamples < 1) throw std::domain_error("mc_expected_ln_cond: need resamples >= 1");
  const long chunks = chunk_count(cfg.trials);
  std::vector<std::vector<double>> parts(chunks);
  std::vector<long> excluded(chunks, 0);
  for_each_chunk(cfg.trials, cfg.workers, [&](long c, long begin, long end) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) {
      const Instance inst = sample_uniform_sphere(m, n, rng);
      const double at = std::abs(sic_general(inst, cfg.sic).t);
      if (at <= kMcIllPosed) {
        ++excluded[c];
        continue;
      }
      parts[c].push_back(-std::log(at));
    }
  });
  std::vector<double> values;
  long excl = 0;
  for (long c = 0; c < chunks; ++c) {
    values.insert(values.end(), parts[c].begin(), parts[c].end());
    excl += excluded[c];
  }
  Moments mo;
  for (double v : values) mo.add(v);
  McEstimate e = make_estimate(mo, cfg.seed);
  e.excluded = excl;
  if (values.empty()) return e;

  Rng rng(cfg.seed, kBootstrapStream);
  std::vector<double> means(resamples);
  const auto size = values.size();
  for (int r = 0; r < resamples; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      s += values[std::min(size - 1, static_cast<std::size_t>(rng.uniform() * size))];
    }
    means[r] = s / size;
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * (resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min<std::size_t>(lo + 1, resamples - 1);
    return means[lo] + (pos - lo) * (means[hi] - means[lo]);
  };
  e.ci95 = {quantile(0.025), quantile(0.975)};
  return e;
}

McEstimate mc_det_moment(int m, int k, const McConfig& cfg) {
  require_trials(cfg);
  if (k < 1 || k > m) throw std::domain_error("mc_det_moment: need 1 <= k <= m");
  const int power = m - k + 1;
  const long chunks = chunk_count(cfg.trials);
  std::vector<Moments> parts(chunks);
  for_each_chunk(cfg.trials, cfg.workers, [&](long c, long begin, long end) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
    for (long i = begin; i < end; ++i) {
      // S^0 = {-1, 1}: a 1 x 1 determinant always has modulus one.
      const double det = k == 1 ? 1.0 : sample_uniform_sphere(k - 1, k, rng).rows.determinant();
      parts[c].add(std::pow(std::abs(det), power));
    }
  });
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return make_estimate(total, cfg.seed);
}

double det_moment_exact(int m, int k) {
  if (k < 1 || k > m) throw std::domain_error("det_moment_exact: need 1 <= k <= m");
  return std::exp(k * (log_sphere_volume(m) - log_sphere_volume(k - 1)) -
                  log_grassmann_volume(k, m + 1));
}

}  // namespace capcov
