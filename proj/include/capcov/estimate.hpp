#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace capcov {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  std::pair<double, double> ci95{0.0, 0.0};
  long excluded = 0;          // ill-posed band hits or other dropped samples
  long censored = 0;          // trials truncated by a draw cap
  bool lower_bound = false;   // censoring occurred: value underestimates

  bool within(double target, double sigmas = 3.0) const {
    return std::abs(value - target) <= sigmas * std_error;
  }
};

/// Running mean/variance (Welford), mergeable across chunks.
struct Moments {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const long n = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / n;
    m2 += o.m2 + d * d * static_cast<double>(count) * o.count / n;
    count = n;
  }

  double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
};

inline McEstimate make_estimate(const Moments& mo, std::uint64_t seed) {
  McEstimate e;
  e.value = mo.count > 0 ? mo.mean : std::numeric_limits<double>::quiet_NaN();
  e.samples = mo.count;
  e.seed = seed;
  e.std_error = mo.count > 0 ? std::sqrt(mo.variance() / mo.count)
                             : std::numeric_limits<double>::infinity();
  e.ci95 = {e.value - 1.96 * e.std_error, e.value + 1.96 * e.std_error};
  return e;
}

/// Frequency estimate with binomial standard error sqrt(p(1-p)/n).
inline McEstimate make_frequency(long hits, long samples, std::uint64_t seed) {
  McEstimate e;
  e.samples = samples;
  e.seed = seed;
  if (samples == 0) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    e.std_error = std::numeric_limits<double>::infinity();
  } else {
    e.value = static_cast<double>(hits) / samples;
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / samples);
  }
  e.ci95 = {e.value - 1.96 * e.std_error, e.value + 1.96 * e.std_error};
  return e;
}

}  // namespace capcov
