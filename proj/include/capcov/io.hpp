#pragma once

#include "capcov/coeffs.hpp"
#include "capcov/condition.hpp"
#include "capcov/estimate.hpp"
#include "capcov/geom.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace capcov {

/// Raised for unreadable or invalid instance files; row() is zero-based, or
/// -1 when the problem is not tied to a row.
class InstanceFormatError : public std::invalid_argument {
 public:
  InstanceFormatError(const std::string& what, int row)
      : std::invalid_argument(what), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

/// Rows within this distance of unit norm are renormalised on load.
inline constexpr double kLoadNormTolerance = 1e-6;

/// One vector per line, m+1 comma-separated values; blank lines and lines
/// starting with '#' are skipped.
Instance parse_instance_csv(const std::string& text);
/// {"m": m, "n": n, "rows": [[...], ...]}; m and n are optional but checked
/// when present.
Instance parse_instance_json(const std::string& text);
/// Dispatches on the first non-blank character ('{' means JSON).
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);

std::string instance_to_csv(const Instance& inst);
nlohmann::json instance_to_json(const Instance& inst);

/// {estimator, params, value, std_error, ci95, seed, trials} plus the
/// excluded/censored counts and the lower-bound flag.
nlohmann::json mc_record(const std::string& estimator, const nlohmann::json& params,
                         const McEstimate& e);
McEstimate mc_record_estimate(const nlohmann::json& record);

nlohmann::json to_json(const CoeffTable& table);
CoeffTable coeff_table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SicResult& sic);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

std::string read_file(const std::string& path);

}  // namespace capcov
