#include "capcov/quad.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace capcov;
using doctest::Approx;

TEST_CASE("integrate: simple and singular integrands") {
  CHECK(integrate([](double) { return 1.0; }, 0.0, 1.0).value == Approx(1.0).epsilon(1e-15));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 2.0).value ==
        Approx(std::exp(2.0) - 1).epsilon(1e-13));
  // Inverse square-root endpoint singularity.
  const QuadResult r = integrate([](double t) { return 1.0 / std::sqrt(1 - t * t); }, 0.0, 1.0);
  CHECK(r.value == Approx(oracle::pi / 2).epsilon(1e-7));
  CHECK(integrate([](double t) { return std::pow((1 - t) / 2, 3); }, 0.0, 1.0).value ==
        Approx(1.0 / 32).epsilon(1e-14));
  CHECK(integrate([](double) { return 1.0; }, 0.5, 0.5).value == 0.0);
}

TEST_CASE("integrate reports convergence and error") {
  QuadSpec spec;
  spec.rel_tol = 1e-10;
  const QuadResult r = integrate([](double x) { return std::sin(50 * x); }, 0.0, 3.0, spec);
  CHECK(r.converged);
  CHECK(r.value == Approx((1 - std::cos(150.0)) / 50).epsilon(1e-9));
  CHECK(r.error_estimate <= 1e-9);
  CHECK(r.evaluations > 15);
}

TEST_CASE("integrate rejects bad input") {
  CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0), QuadratureError);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0), std::domain_error);
  QuadSpec bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, bad), std::invalid_argument);
}

TEST_CASE("extended precision integration") {
  QuadSpec spec;
  spec.rel_tol = 1e-18;
  spec.abs_tol = 0.0;
  const QuadResultExt r =
      integrate(IntegrandExt([](long double x) { return std::exp(x); }), 0.0L, 1.0L, spec);
  CHECK(std::abs(r.value - (std::exp(1.0L) - 1)) < 1e-17L);
}

TEST_CASE("coverage kernel against polynomial antiderivatives") {
  // n=2, m=1, k=1: int_0^1 (1-t^2)^{-1/2} dt.
  CHECK(integrate_coverage_kernel(2, 1, 1, 0.0, 1.0).value == Approx(oracle::pi / 2).epsilon(1e-10));
  // n=4, m=2, k=2: int_0^1 (1-t^2) lambda_2(t) dt = 5/24.
  CHECK(integrate_coverage_kernel(4, 2, 2, 0.0, 1.0).value == Approx(5.0 / 24).epsilon(1e-12));
  CHECK(integrate_coverage_kernel(3, 2, 1, 1.0, 1.0).value == 0.0);
  // The scaled kernel carries 2^{n-k-1}.
  CHECK(integrate_coverage_kernel_scaled(4, 2, 2, 0.0, 1.0).value == Approx(5.0 / 12).epsilon(1e-12));
  // Both variable choices agree.
  QuadSpec direct;
  direct.substitute_endpoint = false;
  CHECK(integrate_coverage_kernel(7, 3, 2, 0.1, 0.9, direct).value ==
        Approx(integrate_coverage_kernel(7, 3, 2, 0.1, 0.9).value).epsilon(1e-10));
  CHECK(static_cast<double>(integrate_coverage_kernel_scaled_ext(4, 2, 2, {}).value) ==
        Approx(5.0 / 12).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_coverage_kernel(3, 2, 3, 0.0, 1.0), std::domain_error);
}

TEST_CASE("infeasible kernel against a Simpson oracle") {
  // m=2: (1-t^2)^{1} (1 - lambda_2(t))^{n-3} with 1 - lambda_2(t) = (1+t)/2.
  const double want =
      oracle::simpson([](double t) { return (1 - t * t) * std::pow((1 + t) / 2, 4); }, 0.0, 0.6);
  CHECK(integrate_infeasible_kernel(7, 2, 0.0, 0.6).value == Approx(want).epsilon(1e-10));
}
