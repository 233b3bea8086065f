#include "capcov/io.hpp"

#include <doctest.h>

#include <cmath>

using namespace capcov;
using doctest::Approx;

TEST_CASE("instance CSV and JSON parsing") {
  const Instance a = parse_instance("# two rows\n1,0\n0,1\n");
  CHECK(a.n() == 2);
  CHECK(a.m() == 1);
  const Instance b = parse_instance(R"({"m": 1, "n": 2, "rows": [[1, 0], [0, 1]]})");
  CHECK(a.rows == b.rows);
  // Renormalised when close to unit norm.
  const Instance c = parse_instance("1.0000004,0\n0,0.9999996\n");
  CHECK(c.rows.row(0).norm() == Approx(1.0).epsilon(1e-15));
  CHECK(c.rows(1, 1) == 1.0);
}

TEST_CASE("instance rejection names the row") {
  try {
    parse_instance("1,0\n0.9,0\n");
    FAIL("expected rejection");
  } catch (const InstanceFormatError& e) {
    CHECK(e.row() == 1);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_instance("1,0\n1,0,0\n"), InstanceFormatError);
  CHECK_THROWS_AS(parse_instance("1,x\n"), InstanceFormatError);
  CHECK_THROWS_AS(parse_instance(R"({"m": 2, "rows": [[1, 0]]})"), InstanceFormatError);
  CHECK_THROWS_AS(parse_instance(""), InstanceFormatError);
}

TEST_CASE("round trips") {
  const Instance inst = sample_uniform_sphere(3, 9, 42);
  CHECK(parse_instance(instance_to_csv(inst)).rows == inst.rows);
  CHECK(parse_instance(instance_to_json(inst).dump()).rows == inst.rows);

  McEstimate e = make_frequency(37, 1000, 5);
  e.censored = 2;
  e.lower_bound = true;
  const nlohmann::json rec = mc_record("mc_coverage", {{"n", 4}}, e);
  CHECK(rec["estimator"] == "mc_coverage");
  CHECK(rec["trials"] == 1000);
  const McEstimate back = mc_record_estimate(nlohmann::json::parse(rec.dump()));
  CHECK(back.value == e.value);
  CHECK(back.std_error == e.std_error);
  CHECK(back.ci95 == e.ci95);
  CHECK(back.censored == 2);
  CHECK(back.lower_bound);

  const CoeffTable t = coeff_table(4);
  const CoeffTable u = coeff_table_from_json(nlohmann::json::parse(to_json(t).dump()));
  for (int k = 1; k <= 4; ++k) {
    CHECK(u(k) == t(k));
    CHECK(u.at(k).provenance == t.at(k).provenance);
  }
  for (double x : {0.1, 1.0 / 3, 6.02214076e23, -2.5e-300}) CHECK(std::stod(format_double(x)) == x);
}
