#include <doctest.h>

#include <cmath>
#include <numbers>

#include "capflow/error.hpp"
#include "capflow/radial.hpp"

using namespace capflow;
using std::numbers::pi;

TEST_CASE("flat p=2 potential") {
  const auto pot = solve_radial(MetricSpec::flat(1.0), 2.0);
  CHECK(pot.capacity() == doctest::Approx(4 * pi).epsilon(1e-10));
  CHECK(pot.c_p() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pot.t_p() == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : {1.0, 1.5, 2.0, 10.0, 1000.0}) CHECK(pot.u(r) == doctest::Approx(1.0 - 1.0 / r).epsilon(1e-10));
}

TEST_CASE("flat p=1.5 potential") {
  const auto pot = solve_radial(MetricSpec::flat(1.0), 1.5);
  CHECK(pot.capacity() == doctest::Approx(4 * pi * std::sqrt(3.0)).epsilon(1e-10));
  for (double r : {1.2, 3.0, 30.0}) {
    CHECK(pot.one_minus_u(r) == doctest::Approx(std::pow(r, -3.0)).epsilon(1e-9));
  }
}

TEST_CASE("schwarzschild p=2 potential") {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.0);
  CHECK(pot.capacity() == doctest::Approx(4 * pi).epsilon(1e-10));
  CHECK(pot.c_p() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pot.t_p() == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : {0.6, 1.0, 4.0, 100.0}) {
    const double exact = (1 - 1 / (2 * r)) / (1 + 1 / (2 * r));
    CHECK(pot.u(r) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(radial_capacity(MetricSpec::schwarzschild(1.0), 2.0) == doctest::Approx(4 * pi).epsilon(1e-10));
}

TEST_CASE("level radii invert the potential") {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.5);
  for (double r : {0.7, 3.0, 200.0}) CHECK(pot.radius_of_level(pot.u(r)) == doctest::Approx(r).epsilon(1e-9));
  CHECK(pot.radius_of_level(0.0) == doctest::Approx(0.5));
}

TEST_CASE("radial geometry") {
  const auto flat = solve_radial(MetricSpec::flat(1.0), 2.0);
  const auto g = radial_geometry_at(flat, 2.0);
  CHECK(g.grad_norm == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(g.mean_curvature == doctest::Approx(1.0));
  CHECK(g.area == doctest::Approx(16 * pi));

  const auto schw = solve_radial(MetricSpec::schwarzschild(1.0), 2.0);
  CHECK(std::abs(radial_geometry_at(schw, 0.5).mean_curvature) < 1e-12);
  const double r = 100.0, phi = 1 + 1 / (2 * r);
  const double H = (2 / r - 2 / (r * r * phi)) / (phi * phi);
  const double areal = r * phi * phi;
  CHECK(radial_geometry_at(schw, r).mean_curvature == doctest::Approx(H).epsilon(1e-12));
  CHECK(radial_geometry_at(schw, r).mean_curvature == doctest::Approx(2 / areal).epsilon(0.02));
}

TEST_CASE("flux is constant across levels") {
  const auto spec = MetricSpec::conformal_polynomial({1.0, 0.5, 0.1}, 0.6);
  for (double p : {1.3, 2.0, 2.7}) {
    const auto pot = solve_radial(spec, p);
    for (double r : {0.6, 0.9, 3.0, 40.0, 2000.0}) {
      const auto g = radial_geometry_at(pot, r);
      CHECK(std::pow(g.grad_norm, p - 1) * g.area == doctest::Approx(pot.capacity()).epsilon(1e-8));
    }
  }
}

TEST_CASE("decay exponent of 1-u") {
  for (double p : {1.5, 2.0, 2.5}) {
    const auto fit = fit_decay(solve_radial(MetricSpec::schwarzschild(1.0), p));
    CHECK(fit.expected == doctest::Approx((3 - p) / (p - 1)));
    CHECK(fit.relative_error <= 0.01);
    CHECK(fit.beta > 0.5);
  }
}

TEST_CASE("exponent range is enforced") {
  CHECK_THROWS_AS(solve_radial(MetricSpec::flat(1.0), 1.0), ParameterError);
  CHECK_THROWS_AS(solve_radial(MetricSpec::flat(1.0), 2.95), ParameterError);
  CHECK_NOTHROW(require_supported_exponent(1.01));
  CHECK_NOTHROW(require_supported_exponent(2.9));
}
