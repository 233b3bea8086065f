#pragma once

#include "capcov/geom.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace capcov {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::vector<CheckLine> checks;

  bool pass() const;
  int failures() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  long trials = 0;  // 0: the per-criterion default
};

inline constexpr int kCriterionCount = 11;

/// Runs criterion `id` (1..11) and times it; the runtime budget is part of
/// the verdict.
CriterionReport run_criterion(int id, const AcceptanceOptions& opts = {});

/// One summary line: "criterion  7  FAIL  <title>  (12.3 s / 600 s)".
std::string summary_line(const CriterionReport& r);
/// Summary line followed by one indented line per check.
std::string detailed_report(const CriterionReport& r);

/// t(A) = max over p of min_i <a_i, p> by brute-force search: a dense grid on
/// S^1 or S^2 followed by local grid refinement around the best points.
/// Independent of the solvers in geom; m must be 1 or 2.
double grid_search_t(const Instance& inst);

}  // namespace capcov
