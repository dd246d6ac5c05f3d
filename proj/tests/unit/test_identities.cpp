#include <doctest.h>

#include <cmath>

#include "capflow/identities.hpp"

using namespace capflow;

TEST_CASE("div X at a schwarzschild point") {
  // both sides from tests/oracles/symbolic_oracles.py
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.0);
  const auto c = divX_residual(pot, Vec3(2, 0, 0));
  CHECK(c.first == doctest::Approx(0.00786432).epsilon(1e-8));
  CHECK(c.second == doctest::Approx(0.00786432).epsilon(1e-10));
  CHECK(c.relative() <= 1e-6);
}

TEST_CASE("flat p=2 identities vanish termwise") {
  const auto pot = solve_radial(MetricSpec::flat(1.0), 2.0);
  const Vec3 x(0, 2, 0);
  const auto d = divX_residual(pot, x);
  CHECK(std::abs(d.first) <= 1e-9);
  CHECK(std::abs(d.second) <= 1e-12);
  const auto k = kato_residual(pot, x);
  CHECK(std::abs(k.first - k.second) <= 1e-12);
  CHECK(k.scale == doctest::Approx(0.09375).epsilon(1e-10));  // |hess u|^2
}

TEST_CASE("symbolic path at random points") {
  for (double p : {1.5, 2.0, 2.5}) {
    const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), p);
    for (const Vec3& x : random_points(7, 100, 0.6, 20.0)) {
      const auto id = identities_at(pot, x);
      CHECK(id.div_x.relative() <= 1e-6);
      CHECK(id.kato.relative() <= 1e-6);
      CHECK(id.div_y.relative() <= 1e-6);
      CHECK(id.mean_curvature.relative() <= 1e-6);
      CHECK(id.div_y.P >= 0.0);
    }
  }
}

TEST_CASE("grid path refinement orders") {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.5);
  const auto pts = random_points(3, 10, 1.5, 6.0);
  const auto rs = identity_refinement(pot, pts, 0.125);
  CHECK(rs.div_x_order >= 1.8);
  CHECK(rs.kato_order >= 1.0);
  CHECK(rs.p_nonnegative);
  // D stays bounded under refinement
  CHECK(rs.max_abs_D_fine <= 2 * rs.max_abs_D_coarse);
}

TEST_CASE("P is nonnegative on many grid-path samples") {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.5);
  int negative = 0;
  for (const Vec3& x : random_points(11, 10000, 1.0, 8.0)) {
    if (sampled_identities(pot, x, 0.125).div_y.P < 0.0) ++negative;
  }
  CHECK(negative == 0);
}

TEST_CASE("random points are reproducible and inside the shell") {
  const auto a = random_points(5, 50, 1.0, 10.0);
  const auto b = random_points(5, 50, 1.0, 10.0);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i].norm() >= 1.0);
    CHECK(a[i].norm() <= 10.0);
  }
}
