#include "capcov/acceptance.hpp"
#include "capcov/coeffs.hpp"
#include "capcov/condition.hpp"
#include "capcov/coverage.hpp"
#include "capcov/geom.hpp"
#include "capcov/io.hpp"
#include "capcov/mc.hpp"
#include "capcov/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace capcov;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Settings {
  std::string format = "csv";
  std::string out;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string trials;  // parsed leniently so that "1e5" works
  double rel_tol = 0.0;
  bool degrees = false;

  int m = 0;
  int n = 0;
  int k = 0;
  double alpha = kPi / 2;
  std::vector<double> eps;
  bool inv_eps = false;
  std::string method;
  std::string file;
  std::string suite;
  std::string estimator;
  long draw_cap = kDefaultDrawCap;
};

struct Emitter {
  const Settings& s;
  json config;
  std::ostringstream body;
  json result;

  std::string render() const {
    if (s.format == "json") return json{{"config", config}, {"result", result}}.dump(2) + "\n";
    std::string out;
    for (const auto& [key, value] : config.items()) {
      out += "# " + key + " = " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
    }
    return out + body.str();
  }
};

long parse_trials(const std::string& text, long fallback) {
  if (text.empty()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size() || !(v >= 1.0) || v != std::floor(v) || v > 1e15) {
    throw CLI::ValidationError("--trials", "expected a positive integer, got '" + text + "'");
  }
  return static_cast<long>(v);
}

QuadSpec quad_spec(const Settings& s) {
  QuadSpec q;
  if (s.rel_tol > 0.0) q.rel_tol = s.rel_tol;
  return q;
}

double angle(const Settings& s) { return s.degrees ? s.alpha * kPi / 180.0 : s.alpha; }

std::vector<double> eps_grid(const Settings& s) {
  std::vector<double> out;
  for (double e : s.eps) {
    if (s.inv_eps) {
      if (!(e >= 1.0)) throw std::domain_error("--inv-eps values must be >= 1");
      out.push_back(1.0 / e);
    } else {
      out.push_back(e);
    }
  }
  return out;
}

json base_config(const Settings& s, const std::string& command) {
  const QuadSpec q = quad_spec(s);
  return {{"command", command},
          {"format", s.format},
          {"quad.rel_tol", q.rel_tol},
          {"quad.abs_tol", q.abs_tol},
          {"quad.max_depth", q.max_depth},
          {"rng", rng_identity()},
          {"seed", s.seed},
          {"workers", s.workers}};
}

McConfig mc_config(const Settings& s, long trials) {
  McConfig cfg;
  cfg.trials = trials;
  cfg.seed = s.seed;
  cfg.workers = s.workers;
  return cfg;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
  return out + "\n";
}

std::string num(double x) { return format_double(x); }

std::string mc_csv_header() { return "estimator,value,std_error,ci95_lo,ci95_hi,seed,trials,excluded,censored,lower_bound\n"; }

std::string mc_csv(const std::string& name, const McEstimate& e) {
  return csv_row({name, num(e.value), num(e.std_error), num(e.ci95.first), num(e.ci95.second),
                  std::to_string(e.seed), std::to_string(e.samples), std::to_string(e.excluded),
                  std::to_string(e.censored), e.lower_bound ? "true" : "false"});
}

// ------------------------------------------------------------ subcommands

int cmd_coeffs(const Settings& s, Emitter& out) {
  const std::string method = s.method.empty() ? "system" : s.method;
  out.config["m"] = s.m;
  out.config["method"] = method;
  CoeffTable table;
  table.m = s.m;
  if (method == "system") {
    table = coeff_solve_linear_system(s.m, quad_spec(s));
    out.config["condition_estimate"] = table.condition_estimate;
    out.config["residual"] = table.residual;
    out.config["degraded"] = table.degraded;
  } else if (method == "closed") {
    for (int k = 1; k <= s.m; ++k) {
      const auto v = coeff_closed_form(s.m, k);
      if (!v) {
        throw std::domain_error("no closed form for C(" + std::to_string(s.m) + "," +
                                std::to_string(k) + "); use --method auto or system");
      }
      table.entries.push_back({k, *v, Provenance::ClosedForm, 0.0});
    }
  } else if (method == "auto") {
    table = coeff_table(s.m, quad_spec(s));
  } else if (method == "mc") {
    const long trials = parse_trials(s.trials, 1000000);
    out.config["trials"] = trials;
    for (int k = 1; k <= s.m; ++k) {
      const McEstimate e = coeff_monte_carlo(s.m, k, trials, s.seed, s.workers);
      table.entries.push_back({k, e.value, Provenance::MonteCarlo, e.std_error});
    }
  } else {
    throw CLI::ValidationError("--method", "expected closed, system, auto or mc");
  }
  out.result = to_json(table);
  out.body << coeff_table_csv(table);
  return 0;
}

int cmd_coverage(const Settings& s, Emitter& out) {
  const double alpha = angle(s);
  const CoverageQuery q{s.n, s.m, alpha};
  q.validate();
  out.config["n"] = s.n;
  out.config["m"] = s.m;
  out.config["alpha"] = alpha;
  const std::string method = s.method.empty() ? "auto" : s.method;
  out.config["method"] = method;

  std::vector<std::pair<std::string, double>> rows;
  if (method == "auto" || method == "analytic") {
    const CoeffTable table = coeff_table(s.m, quad_spec(s));
    if (alpha >= kPi / 2) {
      rows.push_back({"exact", p_not_covered_exact(q, table, quad_spec(s))});
    } else {
      rows.push_back({"upper-bound", p_not_covered_bound(q, table, quad_spec(s))});
    }
    if (std::abs(alpha - kPi / 2) < 1e-12) rows.push_back({"wendel", wendel(s.n, s.m)});
    if (s.m == 1) rows.push_back({"stevens", stevens_exact(s.n, alpha)});
    if (s.m == 2 && alpha >= kPi / 2) rows.push_back({"miles", miles_exact(s.n, alpha, quad_spec(s))});
    if (s.m == 2) {
      const GilbertBounds g = gilbert_bounds(s.n, alpha);
      if (g.valid) {
        rows.push_back({"gilbert-lower", g.lower});
        rows.push_back({"gilbert-upper", g.upper});
      }
    }
    json r = json::object();
    out.body << "kind,value\n";
    for (const auto& [kind, v] : rows) {
      r[kind] = v;
      out.body << kind << ',' << num(v) << '\n';
    }
    out.result = r;
    return 0;
  }
  if (method == "mc") {
    const long trials = parse_trials(s.trials, 100000);
    out.config["trials"] = trials;
    McConfig cfg = mc_config(s, trials);
    cfg.sic.enumeration_cap = std::max(cfg.sic.enumeration_cap, s.n);
    const McEstimate e = mc_coverage(s.n, s.m, alpha, cfg);
    out.result = mc_record("mc_coverage", {{"n", s.n}, {"m", s.m}, {"alpha", alpha}}, e);
    out.body << mc_csv_header() << mc_csv("mc_coverage", e);
    return 0;
  }
  throw CLI::ValidationError("--method", "expected auto or mc");
}

int cmd_condition(const Settings& s, Emitter& out) {
  std::vector<double> grid = eps_grid(s);
  if (grid.empty()) grid = {0.1, 0.3, 0.5, 0.8, 1.0};
  out.config["n"] = s.n;
  out.config["m"] = s.m;
  out.config["eps"] = grid;
  const CoeffTable table = coeff_table(s.m, quad_spec(s));
  const long trials = s.trials.empty() ? 0 : parse_trials(s.trials, 0);
  std::optional<CondTailsMc> mc;
  if (trials > 0) {
    out.config["trials"] = trials;
    mc = mc_condition_tails(s.n, s.m, grid, mc_config(s, trials));
  }
  out.body << "eps,inv_eps,feasible_tail,infeasible_bound,infeasible_bound_raw,clamped,"
              "explicit_infeasible,explicit_feasible";
  if (mc) out.body << ",mc_feasible_tail,mc_feasible_se,mc_infeasible_tail,mc_infeasible_se";
  out.body << '\n';
  json rows = json::array();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double e = grid[j];
    const double f = cond_tail_feasible(s.n, s.m, e, table, quad_spec(s));
    std::optional<TailBound> b;
    if (s.n > s.m + 1) b = cond_tail_infeasible_bound(s.n, s.m, e, table, quad_spec(s));
    const ExplicitTail x = tail_bound_explicit(s.n, s.m, e);
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    out.body << num(e) << ',' << num(1.0 / e) << ',' << num(f) << ','
             << (b ? num(b->value) : "") << ',' << (b ? num(b->raw) : "") << ','
             << (b ? (b->clamped ? "true" : "false") : "") << ',' << opt(x.infeasible) << ','
             << opt(x.feasible);
    json row = {{"eps", e}, {"feasible_tail", f}};
    if (b) row["infeasible_bound"] = {{"value", b->value}, {"raw", b->raw}, {"clamped", b->clamped}};
    if (x.infeasible) row["explicit_infeasible"] = *x.infeasible;
    if (x.feasible) row["explicit_feasible"] = *x.feasible;
    if (mc) {
      const McEstimate& mf = mc->feasible_tail[j];
      const McEstimate& mi = mc->infeasible_tail[j];
      out.body << ',' << num(mf.value) << ',' << num(mf.std_error) << ',' << num(mi.value) << ','
               << num(mi.std_error);
      row["mc_feasible_tail"] = mc_record("mc_condition_tails.feasible", {{"eps", e}}, mf);
      row["mc_infeasible_tail"] = mc_record("mc_condition_tails.infeasible", {{"eps", e}}, mi);
    }
    out.body << '\n';
    rows.push_back(row);
  }
  out.result = {{"rows", rows}};
  if (mc) {
    out.result["feasible_fraction"] =
        mc_record("mc_condition_tails.feasible_fraction", {{"n", s.n}, {"m", s.m}}, mc->feasible_fraction);
    out.result["ill_posed"] = mc->ill_posed;
    out.config["mc.ill_posed"] = mc->ill_posed;
    out.config["mc.feasible_fraction"] = mc->feasible_fraction.value;
  }
  return 0;
}

int cmd_gcc(const Settings& s, Emitter& out) {
  out.config["file"] = s.file;
  const Instance inst = load_instance(s.file);
  SicOptions opts;
  opts.enumeration_cap = std::max(opts.enumeration_cap, inst.n());
  const SicResult sic = sic_general(inst, opts);
  const CertificateReport cert = verify_sic(inst, sic);
  out.config["m"] = inst.m();
  out.config["n"] = inst.n();
  out.result = to_json(sic);
  out.result["certificate"] = {{"ok", cert.ok},
                               {"inclusion_violation", cert.inclusion_violation},
                               {"blocking_gap", cert.blocking_gap},
                               {"hull_distance", cert.hull_distance},
                               {"message", cert.message}};
  std::string blocking;
  for (int i : sic.blocking_set) blocking += (blocking.empty() ? "" : " ") + std::to_string(i);
  std::string center;
  for (Eigen::Index i = 0; i < sic.center.size(); ++i) {
    center += (i ? " " : "") + num(sic.center(i));
  }
  out.body << "t,rho,condition,feasibility,blocking_set,center,certificate\n"
           << csv_row({num(sic.t), num(sic.rho), num(sic.condition), to_string(sic.feasibility),
                       blocking, center, cert.ok ? "ok" : "failed"});
  return cert.ok ? 0 : 1;
}

int cmd_expected_caps(const Settings& s, Emitter& out) {
  const double alpha = angle(s);
  out.config["m"] = s.m;
  out.config["alpha"] = alpha;
  const double bound = expected_caps_bound(s.m, alpha);
  const CoeffTable table = coeff_table(s.m, quad_spec(s));
  const SeriesResult series = expected_caps_series(s.m, alpha, table, quad_spec(s));
  out.result = {{"bound", bound},
                {"series_partial_sum", series.partial_sum},
                {"series_tail_bound", std::isfinite(series.tail_bound) ? json(series.tail_bound) : json()},
                {"series_terms", series.terms}};
  out.body << "kind,value\n"
           << "bound," << num(bound) << '\n'
           << "series-partial-sum," << num(series.partial_sum) << '\n'
           << "series-tail-bound," << num(series.tail_bound) << '\n';
  if (!s.trials.empty()) {
    const long trials = parse_trials(s.trials, 10000);
    out.config["trials"] = trials;
    out.config["draw_cap"] = s.draw_cap;
    const McEstimate e = mc_expected_caps(s.m, alpha, mc_config(s, trials), s.draw_cap);
    out.result["mc"] = mc_record("mc_expected_caps", {{"m", s.m}, {"alpha", alpha}}, e);
    out.body << "mc," << num(e.value) << '\n' << "mc-std-error," << num(e.std_error) << '\n';
    if (e.lower_bound) {
      out.body << "# WARNING: " << e.censored << " censored trials; mc value is a lower bound\n";
      std::cerr << "warning: " << e.censored << " trials hit the draw cap; the estimate is a lower bound\n";
    }
  }
  return 0;
}

int cmd_simulate(const Settings& s, Emitter& out) {
  const std::string est = s.estimator;
  const long trials = parse_trials(s.trials, 100000);
  const double alpha = angle(s);
  out.config["estimator"] = est;
  out.config["trials"] = trials;
  McConfig cfg = mc_config(s, trials);
  cfg.sic.enumeration_cap = std::max(cfg.sic.enumeration_cap, s.n);
  json params;
  std::vector<std::pair<std::string, McEstimate>> results;
  if (est == "coverage") {
    params = {{"n", s.n}, {"m", s.m}, {"alpha", alpha}};
    results.push_back({"mc_coverage", mc_coverage(s.n, s.m, alpha, cfg)});
  } else if (est == "feasibility") {
    params = {{"n", s.n}, {"m", s.m}};
    results.push_back({"mc_feasible_fraction", mc_feasible_fraction(s.n, s.m, cfg)});
  } else if (est == "cond-tails") {
    std::vector<double> grid = eps_grid(s);
    if (grid.empty()) grid = {0.1, 0.3, 0.5, 0.8, 1.0};
    params = {{"n", s.n}, {"m", s.m}, {"eps", grid}};
    const CondTailsMc r = mc_condition_tails(s.n, s.m, grid, cfg);
    results.push_back({"mc_feasible_fraction", r.feasible_fraction});
    for (std::size_t j = 0; j < grid.size(); ++j) {
      results.push_back({"mc_feasible_tail[eps=" + num(grid[j]) + "]", r.feasible_tail[j]});
      results.push_back({"mc_infeasible_tail[eps=" + num(grid[j]) + "]", r.infeasible_tail[j]});
    }
  } else if (est == "expected-caps") {
    params = {{"m", s.m}, {"alpha", alpha}, {"draw_cap", s.draw_cap}};
    results.push_back({"mc_expected_caps", mc_expected_caps(s.m, alpha, cfg, s.draw_cap)});
  } else if (est == "ln-cond") {
    params = {{"n", s.n}, {"m", s.m}};
    results.push_back({"mc_expected_ln_cond", mc_expected_ln_cond(s.n, s.m, cfg)});
  } else if (est == "det-moment") {
    params = {{"m", s.m}, {"k", s.k}};
    results.push_back({"mc_det_moment", mc_det_moment(s.m, s.k, cfg)});
    out.config["exact"] = det_moment_exact(s.m, s.k);
  } else {
    throw CLI::ValidationError("--estimator",
                               "expected coverage, feasibility, cond-tails, expected-caps, "
                               "ln-cond or det-moment");
  }
  out.result = json::array();
  out.body << mc_csv_header();
  for (const auto& [name, e] : results) {
    out.result.push_back(mc_record(name, params, e));
    out.body << mc_csv(name, e);
  }
  return 0;
}

const std::map<std::string, int>& suites() {
  static const std::map<std::string, int> m = {
      {"table1", 1},       {"closed-forms", 2}, {"identities", 3},   {"normalization", 4},
      {"mc-coverage", 5},  {"mc-condition", 6}, {"expected-caps", 7}, {"ln-cond", 8},
      {"sic-oracle", 9},   {"det-moments", 10}, {"bounds", 11}};
  return m;
}

int cmd_validate(const Settings& s, Emitter& out) {
  std::vector<int> ids;
  if (s.suite == "all") {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  } else if (auto it = suites().find(s.suite); it != suites().end()) {
    ids.push_back(it->second);
  } else if (s.suite == "identities-all") {
    ids = {3, 4};
  } else {
    try {
      ids.push_back(std::stoi(s.suite));
    } catch (const std::exception&) {
      throw CLI::ValidationError("suite", "unknown suite '" + s.suite + "'");
    }
  }
  AcceptanceOptions opts;
  opts.seed = s.seed;
  opts.workers = s.workers;
  opts.trials = s.trials.empty() ? 0 : parse_trials(s.trials, 0);
  out.config["suite"] = s.suite;
  out.config["trials"] = opts.trials > 0 ? std::to_string(opts.trials) : "per-criterion default";
  bool all_pass = true;
  out.result = json::array();
  out.body << "criterion,check,pass,detail\n";
  for (int id : ids) {
    const CriterionReport r = run_criterion(id, opts);
    all_pass = all_pass && r.pass();
    std::cerr << summary_line(r) << '\n';
    json checks = json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      out.body << r.id << ",\"" << c.name << "\"," << (c.pass ? "true" : "false") << ",\""
               << c.detail << "\"\n";
    }
    out.result.push_back({{"criterion", r.id},
                          {"title", r.title},
                          {"pass", r.pass()},
                          {"seconds", r.seconds},
                          {"checks", checks}});
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Random spherical cap coverage, condition-number tails and smallest including caps"};
  app.require_subcommand(1);
  app.add_option("--format", s.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", s.out, "Write output to this file instead of stdout");
  app.add_option("--workers", s.workers, "Monte Carlo threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", s.seed, "Monte Carlo seed");
  app.add_option("--rel-tol", s.rel_tol, "Quadrature relative tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--degrees", s.degrees, "Angles are given in degrees");

  auto add_common = [&](CLI::App* c) {
    // Accept the global options after the subcommand as well.
    c->fallthrough();
    return c;
  };
  auto* coeffs = add_common(app.add_subcommand("coeffs", "Coefficients C(m,k), k = 1..m"));
  coeffs->add_option("--m", s.m, "Sphere dimension")->required()->check(CLI::Range(1, 60));
  coeffs->add_option("--method", s.method, "closed | system | auto | mc (default system)");
  coeffs->add_option("--trials", s.trials, "Samples per coefficient for --method mc");

  auto* coverage = add_common(app.add_subcommand("coverage", "Probability that n caps fail to cover S^m"));
  coverage->add_option("--n", s.n, "Number of caps")->required();
  coverage->add_option("--m", s.m, "Sphere dimension")->required();
  coverage->add_option("--alpha", s.alpha, "Cap radius")->required();
  coverage->add_option("--method", s.method, "auto | mc (default auto)");
  coverage->add_option("--trials", s.trials, "Monte Carlo trials for --method mc");

  auto* condition = add_common(app.add_subcommand("condition", "Tails of the GCC condition number"));
  condition->add_option("--n", s.n, "Number of points")->required();
  condition->add_option("--m", s.m, "Sphere dimension")->required();
  condition->add_option("--eps", s.eps, "Grid of eps values (or 1/eps with --inv-eps)")->delimiter(',');
  condition->add_flag("--inv-eps", s.inv_eps, "Interpret --eps values as 1/eps");
  condition->add_option("--trials", s.trials, "Also run a Monte Carlo check with this many instances");

  auto* gcc = add_common(app.add_subcommand("gcc", "Smallest including cap of an instance file"));
  gcc->add_option("file", s.file, "Instance file (CSV or JSON)")->required()->check(CLI::ExistingFile);

  auto* caps = add_common(app.add_subcommand("expected-caps", "Expected number of caps to cover S^m"));
  caps->add_option("--m", s.m, "Sphere dimension")->required();
  caps->add_option("--alpha", s.alpha, "Cap radius")->required();
  caps->add_option("--trials", s.trials, "Also run a Monte Carlo estimate with this many trials");
  caps->add_option("--draw-cap", s.draw_cap, "Maximum caps per trial")->check(CLI::PositiveNumber);

  auto* simulate = add_common(app.add_subcommand("simulate", "Run one Monte Carlo estimator"));
  simulate->add_option("--estimator", s.estimator,
                       "coverage | feasibility | cond-tails | expected-caps | ln-cond | det-moment")
      ->required();
  simulate->add_option("--n", s.n, "Number of points or caps");
  simulate->add_option("--m", s.m, "Sphere dimension");
  simulate->add_option("--k", s.k, "Determinant size for det-moment");
  simulate->add_option("--alpha", s.alpha, "Cap radius");
  simulate->add_option("--eps", s.eps, "eps grid for cond-tails")->delimiter(',');
  simulate->add_flag("--inv-eps", s.inv_eps, "Interpret --eps values as 1/eps");
  simulate->add_option("--trials", s.trials, "Trials");
  simulate->add_option("--draw-cap", s.draw_cap, "Maximum caps per trial")->check(CLI::PositiveNumber);

  auto* validate = add_common(app.add_subcommand("validate", "Run acceptance suites"));
  validate->add_option("suite", s.suite,
                       "table1 | closed-forms | identities | normalization | mc-coverage | "
                       "mc-condition | expected-caps | ln-cond | sic-oracle | det-moments | "
                       "bounds | all | 1..11")
      ->required();
  validate->add_option("--trials", s.trials, "Override the per-criterion trial counts");

  CLI11_PARSE(app, argc, argv);

  try {
    Emitter out{s, {}, {}, {}};
    int code = 0;
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    out.config = base_config(s, name);
    if (name == "coeffs") code = cmd_coeffs(s, out);
    else if (name == "coverage") code = cmd_coverage(s, out);
    else if (name == "condition") code = cmd_condition(s, out);
    else if (name == "gcc") code = cmd_gcc(s, out);
    else if (name == "expected-caps") code = cmd_expected_caps(s, out);
    else if (name == "simulate") code = cmd_simulate(s, out);
    else if (name == "validate") code = cmd_validate(s, out);

    const std::string text = out.render();
    if (s.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(s.out);
      if (!f) throw std::runtime_error("cannot write " + s.out);
      f << text;
    }
    return code;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const InstanceFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
