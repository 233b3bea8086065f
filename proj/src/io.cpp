#include "capcov/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace capcov {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, int row) {
  const std::string f = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw InstanceFormatError("row " + std::to_string(row) + ": cannot parse '" + f + "'", row);
  }
  return v;
}

Instance assemble(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InstanceFormatError("instance has no rows", -1);
  const std::size_t d = rows.front().size();
  if (d < 2) throw InstanceFormatError("row 0: need at least 2 coordinates", 0);
  Instance inst;
  inst.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = static_cast<int>(i);
    if (rows[i].size() != d) {
      throw InstanceFormatError("row " + std::to_string(r) + ": expected " + std::to_string(d) +
                                    " coordinates, found " + std::to_string(rows[i].size()),
                                r);
    }
    Eigen::VectorXd v(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(rows[i][j])) {
        throw InstanceFormatError("row " + std::to_string(r) + ": non-finite coordinate", r);
      }
      v(static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > kLoadNormTolerance) {
      std::ostringstream msg;
      msg.precision(10);
      msg << "row " << r << ": norm " << norm << " is not within " << kLoadNormTolerance
          << " of 1";
      throw InstanceFormatError(msg.str(), r);
    }
    // Rows already unit to rounding are kept bit-for-bit so files round-trip.
    if (std::abs(norm - 1.0) > 4 * std::numeric_limits<double>::epsilon()) v /= norm;
    inst.rows.row(r) = v.transpose();
  }
  return inst;
}

}  // namespace

Instance parse_instance_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const int r = static_cast<int>(rows.size());
    std::vector<double> row;
    std::istringstream fields(t);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(parse_number(field, r));
    rows.push_back(std::move(row));
  }
  return assemble(rows);
}

Instance parse_instance_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceFormatError(std::string("invalid JSON: ") + e.what(), -1);
  }
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
    throw InstanceFormatError("JSON instance needs a 'rows' array", -1);
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : j["rows"]) {
    const int r = static_cast<int>(rows.size());
    if (!row.is_array()) throw InstanceFormatError("row " + std::to_string(r) + ": not an array", r);
    std::vector<double> v;
    for (const auto& x : row) {
      if (!x.is_number()) {
        throw InstanceFormatError("row " + std::to_string(r) + ": non-numeric coordinate", r);
      }
      v.push_back(x.get<double>());
    }
    rows.push_back(std::move(v));
  }
  Instance inst = assemble(rows);
  if (j.contains("m") && j["m"].get<int>() != inst.m()) {
    throw InstanceFormatError("declared m does not match the row length", -1);
  }
  if (j.contains("n") && j["n"].get<int>() != inst.n()) {
    throw InstanceFormatError("declared n does not match the number of rows", -1);
  }
  return inst;
}

Instance parse_instance(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return parse_instance_json(t);
  return parse_instance_csv(text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(x);
}

std::string instance_to_csv(const Instance& inst) {
  std::string out;
  for (int i = 0; i < inst.n(); ++i) {
    for (int j = 0; j <= inst.m(); ++j) {
      if (j > 0) out += ',';
      out += format_double(inst.rows(i, j));
    }
    out += '\n';
  }
  return out;
}

json instance_to_json(const Instance& inst) {
  json rows = json::array();
  for (int i = 0; i < inst.n(); ++i) {
    json row = json::array();
    for (int j = 0; j <= inst.m(); ++j) row.push_back(inst.rows(i, j));
    rows.push_back(row);
  }
  return {{"m", inst.m()}, {"n", inst.n()}, {"rows", rows}};
}

namespace {

// JSON has no infinities or NaN; emit them as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

json mc_record(const std::string& estimator, const json& params, const McEstimate& e) {
  return {{"estimator", estimator},
          {"params", params},
          {"value", number_or_null(e.value)},
          {"std_error", number_or_null(e.std_error)},
          {"ci95", {number_or_null(e.ci95.first), number_or_null(e.ci95.second)}},
          {"seed", e.seed},
          {"trials", e.samples},
          {"excluded", e.excluded},
          {"censored", e.censored},
          {"lower_bound", e.lower_bound}};
}

McEstimate mc_record_estimate(const json& record) {
  McEstimate e;
  e.value = number_from(record.at("value"));
  e.std_error = number_from(record.at("std_error"));
  e.ci95 = {number_from(record.at("ci95").at(0)), number_from(record.at("ci95").at(1))};
  e.seed = record.at("seed").get<std::uint64_t>();
  e.samples = record.at("trials").get<long>();
  e.excluded = record.value("excluded", 0L);
  e.censored = record.value("censored", 0L);
  e.lower_bound = record.value("lower_bound", false);
  return e;
}

json to_json(const CoeffTable& table) {
  json entries = json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"k", e.k},
                       {"value", e.value},
                       {"provenance", to_string(e.provenance)},
                       {"uncertainty", number_or_null(e.uncertainty)}});
  }
  return {{"m", table.m},
          {"entries", entries},
          {"condition_estimate", table.condition_estimate},
          {"residual", table.residual},
          {"degraded", table.degraded}};
}

CoeffTable coeff_table_from_json(const json& j) {
  CoeffTable t;
  t.m = j.at("m").get<int>();
  for (const auto& e : j.at("entries")) {
    t.entries.push_back({e.at("k").get<int>(), e.at("value").get<double>(),
                         provenance_from_string(e.at("provenance").get<std::string>()),
                         number_from(e.at("uncertainty"))});
  }
  t.condition_estimate = j.value("condition_estimate", 0.0);
  t.residual = j.value("residual", 0.0);
  t.degraded = j.value("degraded", false);
  return t;
}

json to_json(const SicResult& sic) {
  json center = json::array();
  for (Eigen::Index i = 0; i < sic.center.size(); ++i) center.push_back(sic.center(i));
  return {{"center", center},
          {"t", sic.t},
          {"rho", sic.rho},
          {"blocking_set", sic.blocking_set},
          {"feasibility", to_string(sic.feasibility)},
          {"condition", number_or_null(sic.condition)},
          {"skipped_singular", sic.skipped_singular}};
}

}  // namespace capcov
