#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "capflow/error.hpp"
#include "capflow/geometry.hpp"

using namespace capflow;
using std::numbers::pi;

TEST_CASE("flat metric is the identity") {
  const auto spec = MetricSpec::flat(1.0);
  const auto pg = metric_at(spec, Vec3(2, 0, 0));
  CHECK((pg.g - Mat3::Identity()).norm() == doctest::Approx(0.0));
  CHECK(pg.sqrt_det_g == doctest::Approx(1.0));
  CHECK(pg.scalar_curvature == doctest::Approx(0.0));
  CHECK(scalar_curvature(spec, Vec3(0.3, 1.7, -2.0)) == doctest::Approx(0.0));
}

TEST_CASE("schwarzschild metric at the horizon") {
  const auto spec = MetricSpec::schwarzschild(1.0);
  const auto pg = metric_at(spec, Vec3(0.5, 0, 0));
  CHECK((pg.g - 16.0 * Mat3::Identity()).norm() < 1e-12);
  CHECK(pg.sqrt_det_g == doctest::Approx(64.0).epsilon(1e-14));
}

TEST_CASE("schwarzschild is scalar flat") {
  const auto spec = MetricSpec::schwarzschild(1.0);
  for (const Vec3& x : {Vec3(1, 0, 0), Vec3(0.5, 0, 0), Vec3(0.4, -0.7, 1.1), Vec3(30, 2, -5)}) {
    CHECK(std::abs(scalar_curvature(spec, x)) <= 1e-10);
  }
}

TEST_CASE("scalar curvature of a non-harmonic conformal factor") {
  // phi = 1 + 1/(2r) + 0.1/r^2 at r = 2; value from tests/oracles/symbolic_oracles.py
  const auto spec = MetricSpec::conformal_polynomial({1.0, 0.5, 0.1}, 0.5);
  const double R = scalar_curvature(spec, Vec3(0, 2, 0));
  CHECK(R == doctest::Approx(-0.029678987176506684).epsilon(1e-12));
}

TEST_CASE("christoffel symbols are symmetric and ricci trace matches R") {
  const auto spec = MetricSpec::conformal_polynomial({1.0, 0.5, 0.1}, 0.5);
  const auto pg = metric_at(spec, Vec3(0.7, -1.1, 0.4));
  for (int k = 0; k < 3; ++k) CHECK((pg.christoffel[k] - pg.christoffel[k].transpose()).norm() < 1e-14);
  CHECK((pg.g_inv * pg.ricci).trace() == doctest::Approx(pg.scalar_curvature).epsilon(1e-10));
}

TEST_CASE("sampled-grid path reproduces the closed form") {
  const auto radial = MetricSpec::conformal_polynomial({1.0, 0.5, 0.1}, 0.5);
  const auto grid = as_sampled_grid(radial, Box{Vec3::Constant(-10), Vec3::Constant(10)}, 1e-3);
  const Vec3 x(1.2, 0.3, -0.8);
  const auto a = metric_at(radial, x), b = metric_at(grid, x);
  CHECK((a.g - b.g).norm() < 1e-13);
  CHECK(b.scalar_curvature == doctest::Approx(a.scalar_curvature).epsilon(1e-4));
}

TEST_CASE("points inside the horizon are rejected") {
  const auto spec = MetricSpec::schwarzschild(1.0);
  CHECK_THROWS_AS(metric_at(spec, Vec3(0.2, 0, 0)), DomainError);
}

TEST_CASE("asymptotic flatness reports") {
  const std::vector<double> radii{10, 20, 40};
  const auto flat = check_asymptotic_flatness(MetricSpec::flat(1.0), radii);
  for (const auto& s : flat.samples) {
    CHECK(s.metric_decay == doctest::Approx(0.0));
    CHECK(s.derivative_decay == doctest::Approx(0.0));
  }
  CHECK(flat.passed());

  const auto schw = check_asymptotic_flatness(MetricSpec::schwarzschild(1.0), radii);
  CHECK(schw.passed());
  // |x| |gamma_ij| -> 2m
  CHECK(schw.samples.back().metric_decay == doctest::Approx(2.0).epsilon(0.05));

  // gamma = delta |x|^{-0.3} does not decay like |x|^{-0.6}
  auto gamma = [](const Vec3& x) -> Mat3 { return std::pow(x.norm(), -0.3) * Mat3::Identity(); };
  const auto bad = MetricSpec::sampled_grid(gamma, Box{Vec3::Constant(-100), Vec3::Constant(100)},
                                            1.0, 0.6, 0.5, 1e-4);
  const auto rep = check_asymptotic_flatness(bad, radii);
  CHECK_FALSE(rep.passed());
}

TEST_CASE("horizon areas") {
  CHECK(horizon_area(MetricSpec::flat(1.0)) == doctest::Approx(4 * pi));
  CHECK(horizon_area(MetricSpec::schwarzschild(1.0)) == doctest::Approx(16 * pi));
  CHECK(horizon_area(MetricSpec::schwarzschild(2.0)) == doctest::Approx(64 * pi));
  CHECK(coordinate_sphere_area(MetricSpec::schwarzschild(1.0), 0.5) == doctest::Approx(16 * pi));
}

TEST_CASE("metric stays positive definite") {
  const auto spec = MetricSpec::conformal_polynomial({1.0, 0.5, 0.1}, 0.5);
  for (double r : {0.5, 0.8, 2.0, 50.0}) {
    const Mat3 g = metric_components(spec, Vec3(r, 0, 0));
    Eigen::SelfAdjointEigenSolver<Mat3> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("gauss-legendre and neville") {
  const auto rule = gauss_legendre(5);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  const SphereQuadrature sq(8);
  double w = 0.0;
  for (const auto& n : sq.nodes) w += n.weight;
  CHECK(w == doctest::Approx(4 * pi));
  // f(h) = 3 + h + h^2 is reproduced exactly
  const std::vector<double> h{0.4, 0.2, 0.1}, f{3.56, 3.24, 3.11};
  CHECK(neville_at_zero(h, f) == doctest::Approx(3.0).epsilon(1e-13));
}
