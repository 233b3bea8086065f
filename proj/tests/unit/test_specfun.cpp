#include "capcov/specfun.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace capcov;
using doctest::Approx;

TEST_CASE("sphere volumes") {
  CHECK(sphere_volume(0) == Approx(2.0));
  CHECK(sphere_volume(1) == Approx(2 * oracle::pi));
  CHECK(sphere_volume(2) == Approx(4 * oracle::pi).epsilon(1e-14));
  CHECK(sphere_volume(4) == Approx(8 * oracle::pi * oracle::pi / 3).epsilon(1e-14));
  for (int m = 0; m <= 40; ++m) {
    CHECK(sphere_volume(m) == Approx(oracle::sphere_volume(m)).epsilon(1e-12));
    CHECK(std::exp(log_sphere_volume(m)) == Approx(sphere_volume(m)).epsilon(1e-12));
  }
  // Large m underflows linearly but not in logs.
  CHECK(std::isfinite(log_sphere_volume(5000)));
  CHECK_THROWS_AS(sphere_volume(-1), std::domain_error);
}

TEST_CASE("alpha_m is twice the volume ratio") {
  for (int m = 1; m <= 20; ++m) {
    CHECK(alpha_m(m) == Approx(2 * oracle::sphere_volume(m - 1) / oracle::sphere_volume(m)).epsilon(1e-12));
  }
}

TEST_CASE("cap fraction: closed forms for m = 1, 2 and the hemisphere") {
  CHECK(cap_fraction(1, 0.5) == Approx(1.0 / 3).epsilon(1e-14));
  CHECK(cap_fraction(2, 0.5) == Approx(0.25).epsilon(1e-14));
  CHECK(cap_fraction(7, 0.0) == Approx(0.5).epsilon(1e-14));
  for (double t : {-0.99, -0.4, 0.0, 0.3, 0.77, 0.999}) {
    CHECK(cap_fraction(1, t) == Approx(std::acos(t) / oracle::pi).epsilon(1e-13));
    CHECK(cap_fraction(2, t) == Approx((1 - t) / 2).epsilon(1e-13));
  }
  CHECK(cap_fraction(3, 1.0) == 0.0);
  CHECK(cap_fraction(3, -1.0) == 1.0);
  CHECK_THROWS_AS(cap_fraction(2, 1.5), std::domain_error);
  CHECK_THROWS_AS(cap_fraction(0, 0.5), std::domain_error);
}

TEST_CASE("cap fraction agrees with a Simpson oracle") {
  for (int m : {3, 4, 5, 8, 13}) {
    for (double t : {-0.8, -0.2, 0.1, 0.5, 0.9}) {
      CAPTURE(m);
      CAPTURE(t);
      CHECK(cap_fraction(m, t) == Approx(oracle::cap_fraction(m, t)).epsilon(1e-9));
      CHECK(cap_fraction_quadrature(m, t) == Approx(cap_fraction(m, t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("cap fraction: angle, log and extended forms agree") {
  for (int m : {1, 2, 5, 30}) {
    for (double th : {0.3, 1.2, 1.9, 3.0}) {
      const double v = cap_fraction(m, std::cos(th));
      CHECK(cap_fraction_angle(m, th) == Approx(v).epsilon(1e-12));
      CHECK(std::exp(log_cap_fraction_angle(m, th)) == Approx(v).epsilon(1e-12));
      CHECK(static_cast<double>(cap_fraction_angle_ext(m, th)) == Approx(v).epsilon(1e-12));
    }
  }
  // Near the pole the angle form keeps full precision where cos(theta) has
  // already lost it.
  CHECK(cap_fraction_angle(1, 1e-6) == Approx(1e-6 / oracle::pi).epsilon(1e-12));
  CHECK(cap_fraction_angle(2, 1e-6) == Approx(std::pow(std::sin(0.5e-6), 2)).epsilon(1e-12));
  // Tiny caps underflow, their logs do not.
  CHECK(std::isfinite(log_cap_fraction(400, 0.99)));
  CHECK(log_cap_fraction(400, 0.99) < -700);
}

TEST_CASE("Grassmannian volumes") {
  CHECK(grassmann_volume(1, 2) == Approx(oracle::pi).epsilon(1e-14));
  CHECK(grassmann_volume(2, 4) == Approx(2 * oracle::pi * oracle::pi).epsilon(1e-14));
  CHECK(grassmann_volume(3, 3) == Approx(1.0).epsilon(1e-14));
  for (int n = 2; n <= 9; ++n) {
    for (int k = 1; k < n; ++k) {
      // Duality G_k(R^n) = G_{n-k}(R^n).
      CHECK(grassmann_volume(k, n) == Approx(grassmann_volume(n - k, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Gamma half-integer bracket") {
  for (int r = 1; r <= 60; ++r) {
    const GammaHalfBounds b = gamma_half_bounds(r);
    const double lg = std::lgamma((r + 1) / 2.0);
    CAPTURE(r);
    CHECK(b.log_lower <= lg + 1e-12);
    CHECK(lg <= b.log_upper + 1e-12);
  }
  const GammaHalfBounds b1 = gamma_half_bounds(1);
  CHECK(b1.lower == Approx(1.0));
  CHECK(b1.upper == Approx(std::sqrt(oracle::pi / 2)));
  const GammaHalfBounds b2 = gamma_half_bounds(2);
  CHECK(b2.lower == Approx(std::pow(2.0, 0.25) / std::sqrt(2.0)));
  CHECK(std::isfinite(gamma_half_bounds(3000).log_upper));
}

TEST_CASE("binomials") {
  CHECK(binomial_exact(60, 30) == 118264581564861424ULL);
  for (int n = 0; n <= 70; ++n) {
    for (int k = 0; k <= n; k += 3) {
      CHECK(binomial(n, k) == Approx(oracle::binomial(n, k)).epsilon(1e-12));
    }
  }
  CHECK(binomial(5, 7) == 0.0);
  CHECK(std::exp(log_binomial(200, 100)) == Approx(oracle::binomial(200, 100)).epsilon(1e-10));
  CHECK(log_factorial(10) == Approx(std::log(3628800.0)).epsilon(1e-14));
}
