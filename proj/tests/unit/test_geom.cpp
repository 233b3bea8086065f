#include "capcov/acceptance.hpp"
#include "capcov/geom.hpp"
#include "capcov/random.hpp"
#include "capcov/specfun.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace capcov;
using doctest::Approx;

namespace {

Instance rows(std::initializer_list<std::initializer_list<double>> r) {
  Instance inst;
  inst.rows.resize(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  int i = 0;
  for (const auto& row : r) {
    int j = 0;
    for (double x : row) inst.rows(i, j++) = x;
    ++i;
  }
  return inst;
}

Instance equiangular() {
  const double c = std::cos(2 * oracle::pi / 3);
  const double s = std::sin(2 * oracle::pi / 3);
  return rows({{1, 0}, {c, s}, {c, -s}});
}

Instance cross3() { return rows({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}); }

}  // namespace

TEST_CASE("SIC of symmetric instances") {
  const SicResult two = sic_general(rows({{1, 0}, {0, 1}}));
  CHECK(two.t == Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(two.condition == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(two.blocking_set == std::vector<int>{0, 1});
  CHECK(two.center(0) == Approx(two.center(1)));
  CHECK(two.feasibility == Feasibility::StrictlyFeasible);

  const SicResult one = sic_general(rows({{0.6, 0.8}}));
  CHECK(one.t == Approx(1.0));
  CHECK(one.rho == Approx(0.0));
  CHECK(one.condition == Approx(1.0));

  const SicResult e3 = sic_general(rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(e3.t == Approx(1 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(e3.blocking_set == std::vector<int>{0, 1, 2});

  const SicResult eq = sic_general(equiangular());
  CHECK(eq.t == Approx(-0.5).epsilon(1e-12));
  CHECK(eq.condition == Approx(2.0).epsilon(1e-12));
  CHECK(eq.feasibility == Feasibility::Infeasible);
  CHECK(eq.rho == Approx(2 * oracle::pi / 3).epsilon(1e-12));

  // Six antipodal unit vectors: the best cap centre is a cube diagonal.
  const SicResult x = sic_general(cross3());
  CHECK(x.t == Approx(-1 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(x.feasibility == Feasibility::Infeasible);
  CHECK(verify_sic(cross3(), x).ok);

  const SicResult anti = sic_general(rows({{1, 0}, {-1, 0}}));
  CHECK(std::abs(anti.t) < 1e-12);
  CHECK(anti.feasibility == Feasibility::IllPosed);
}

TEST_CASE("feasible shortcut and enumeration agree") {
  Rng rng(2024, 0);
  for (int i = 0; i < 300; ++i) {
    const int m = 1 + i % 3;
    const int n = 1 + static_cast<int>(rng.next() % 9);
    const Instance inst = sample_uniform_sphere(m, n, rng);
    const SicResult a = sic_general(inst);
    const SicResult b = sic_enumerate(inst);
    CAPTURE(i);
    CHECK(a.t == Approx(b.t).epsilon(1e-9));
    CHECK(a.blocking_set == b.blocking_set);
    CHECK(verify_sic(inst, a).ok);
    if (auto f = sic_feasible(inst)) CHECK(f->t == Approx(a.t).epsilon(1e-12));
  }
}

TEST_CASE("orthogonal invariance") {
  Rng rng(99, 0);
  for (int i = 0; i < 50; ++i) {
    const Instance inst = sample_uniform_sphere(2, 7, rng);
    Eigen::MatrixXd g(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) g(r, c) = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Instance rotated;
    rotated.rows = inst.rows * q.transpose();
    const SicResult a = sic_general(inst);
    const SicResult b = sic_general(rotated);
    CHECK(a.t == Approx(b.t).epsilon(1e-9));
    CHECK(a.blocking_set == b.blocking_set);
    CHECK((q * a.center - b.center).norm() < 1e-8);
  }
}

TEST_CASE("SIC against brute-force grid search") {
  Rng rng(7, 0);
  for (int i = 0; i < 40; ++i) {
    const Instance inst = sample_uniform_sphere(1 + i % 2, 2 + i % 8, rng);
    CHECK(sic_general(inst).t == Approx(grid_search_t(inst)).epsilon(1e-4));
  }
}

TEST_CASE("coverage decisions") {
  CHECK(covers_sphere(cross3(), oracle::pi / 2 + 0.01));
  CHECK_FALSE(covers_sphere(rows({{0, 0, 1}}), oracle::pi / 2));
  CHECK(covers_sphere(equiangular(), oracle::pi / 3 + 0.01));
  CHECK_FALSE(covers_sphere(equiangular(), oracle::pi / 3 - 0.01));
  Rng rng(5, 0);
  SicOptions opts;
  for (int i = 0; i < 200; ++i) {
    const Instance inst = sample_uniform_sphere(2, 4 + i % 10, rng);
    const double t = sic_general(inst, opts).t;
    for (double a : {0.6, 1.0, 1.4, 1.8, 2.5}) {
      if (std::abs(t + std::cos(a)) < 1e-9) continue;
      CHECK(covers_sphere(inst, a, opts) == (t < -std::cos(a)));
    }
  }
}

TEST_CASE("certificate verification catches wrong answers") {
  const Instance inst = rows({{1, 0}, {0, 1}});
  SicResult bad = sic_general(inst);
  bad.t += 0.05;
  CHECK_FALSE(verify_sic(inst, bad).ok);
  SicResult off = sic_general(inst);
  off.center = Eigen::Vector2d(1, 0);
  off.t = 0.0;
  CHECK_FALSE(verify_sic(inst, off).ok);
}

TEST_CASE("capacity and validation errors") {
  Rng rng(1, 0);
  const Instance big = sample_uniform_sphere(2, 30, rng);
  SicOptions small;
  small.enumeration_cap = 25;
  // 30 random points on S^2 are almost never feasible; enumeration must refuse.
  if (!sic_feasible(big)) CHECK_THROWS_AS(sic_general(big, small), std::length_error);
  Instance notunit = rows({{0.9, 0}});
  CHECK_THROWS_AS(notunit.validate(), std::invalid_argument);
}

TEST_CASE("uniform sampling on spheres") {
  const int n = 100000;
  const Instance s1 = sample_uniform_sphere(1, n, 3);
  CHECK(std::abs(s1.rows.col(0).mean()) < 3 / std::sqrt(2.0 * n));
  CHECK(std::abs(s1.rows.col(1).mean()) < 3 / std::sqrt(2.0 * n));
  const Instance s2 = sample_uniform_sphere(2, n, 4);
  const double f2 = (s2.rows.col(0).array() >= 0.5).cast<double>().mean();
  CHECK(std::abs(f2 - 0.25) < 3 * std::sqrt(0.25 * 0.75 / n));
  const Instance s3 = sample_uniform_sphere(3, n, 5);
  for (double t : {0.2, 0.5, 0.8}) {
    const double p = cap_fraction(3, t);
    const double f = (s3.rows.col(0).array() >= t).cast<double>().mean();
    CHECK(std::abs(f - p) < 3 * std::sqrt(p * (1 - p) / n));
  }
  for (int i = 0; i < 100; ++i) CHECK(s3.rows.row(i).norm() == Approx(1.0).epsilon(1e-14));
}
