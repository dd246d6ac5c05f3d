#include <doctest.h>

#include <cmath>
#include <numbers>

#include "capflow/error.hpp"
#include "capflow/functional.hpp"

using namespace capflow;
using std::numbers::pi;

TEST_CASE("reparametrization") {
  const Reparametrization flat(2.0, 1.0);
  CHECK(flat.t_p() == doctest::Approx(1.0));
  CHECK(flat.alpha(flat.t_p()) == doctest::Approx(0.0));
  CHECK(flat.alpha(2.0) == doctest::Approx(0.5));
  CHECK(flat.t_of(0.75) == doctest::Approx(4.0));
  const Reparametrization r(2.5, 0.37);
  for (double t : {r.t_p() * 1.01, 3.0, 1e4}) {
    CHECK(r.t_of(r.alpha(t)) == doctest::Approx(t).epsilon(1e-10));
    CHECK(r.one_minus_alpha(t) == doctest::Approx(1.0 - r.alpha(t)).epsilon(1e-10));
  }
  CHECK(reparam_alpha(2.0, 1.0, 2.0) == doctest::Approx(0.5));
  CHECK(reparam_inverse(2.0, 1.0, 0.75) == doctest::Approx(4.0));
}

TEST_CASE("flat space: F, M, Q vanish") {
  for (double p : {1.5, 2.0, 2.5}) {
    const auto pot = solve_radial(MetricSpec::flat(1.0), p);
    for (double t : {1.0, 2.0, 4.0, 8.0, 100.0}) {
      const auto v = compute_F(pot, std::max(t, pot.t_p()));
      CHECK(std::abs(v.F) <= 1e-8);
      CHECK(std::abs(v.M) <= 1e-8);
      CHECK(std::abs(v.Q) <= 1e-8);
    }
  }
}

TEST_CASE("schwarzschild p=2 closed form F = 8 pi - 3 pi / t") {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.0);
  const auto first = compute_F(pot, pot.t_p());
  CHECK(first.F == doctest::Approx(5 * pi).epsilon(1e-10));
  CHECK(first.M == doctest::Approx(4 * pi).epsilon(1e-10));
  CHECK(first.Q == doctest::Approx(pi).epsilon(1e-10));
  for (double t : {2.0, 10.0, 1000.0}) CHECK(compute_F(pot, t).F == doctest::Approx(8 * pi - 3 * pi / t).epsilon(1e-9));
  CHECK(compute_F(pot, 1000.0).F == doctest::Approx(8 * pi).epsilon(0.005));
}

TEST_CASE("hawking split holds row by row") {
  for (double p : {1.5, 2.0, 2.5}) {
    const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), p);
    const auto rep = monotonicity_scan(pot, make_t_grid(pot.t_p(), 1000.0, 40, true));
    for (const auto& row : rep.rows) {
      CHECK(row.split_residual <= 1e-10);
      CHECK(row.Q >= 0.0);
    }
  }
}

TEST_CASE("monotonicity scans") {
  const auto flat = solve_radial(MetricSpec::flat(1.0), 2.0);
  const auto fr = monotonicity_scan(flat, {1.0, 2.0, 4.0, 8.0});
  CHECK(fr.verdict.monotone);
  for (const auto& row : fr.rows) CHECK(std::abs(row.F) <= 1e-10);

  for (double p : {1.5, 2.0, 2.5}) {
    const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), p);
    const auto rep = monotonicity_scan(pot, make_t_grid(pot.t_p(), 1000.0, 40, true));
    CHECK(rep.verdict.monotone);
    CHECK(rep.verdict.min_increment >= -1e-8 * 8 * pi);
    CHECK(rep.rows.front().F >= 4 * pi * pot.t_p() - 1e-9);
    CHECK(rep.rows.back().F <= 8 * pi);
  }
}

TEST_CASE("t outside the solved range is refused") {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.0);
  CHECK_THROWS_AS(compute_F(pot, 0.5), DomainError);
}

TEST_CASE("t grids") {
  const auto g = make_t_grid(1.0, 1000.0, 4, true);
  REQUIRE(g.size() == 4);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g[3] == doctest::Approx(1000.0));
  const auto l = make_t_grid(1.0, 4.0, 4, false);
  CHECK(l[2] == doctest::Approx(3.0));
}

TEST_CASE("regularized functional and the defect inequality") {
  const auto spec = MetricSpec::flat(1.0);
  const auto pot = solve_radial(spec, 2.0);
  GridConfig cfg;
  cfg.spacing = 0.125;
  const auto f = solve_regularized(spec, 2.0, 1e-2, cfg, OuterBoundary::oracle(pot, 4.0));
  const double c = c_p_epsilon_boundary(f);
  const Reparametrization rep(2.0, c);
  const double t_hi = rep.t_max(f.T);
  const double s = rep.t_p() * std::pow(t_hi / rep.t_p(), 0.2);
  const double t = rep.t_p() * std::pow(t_hi / rep.t_p(), 0.8);
  // p = 2: F^eps is the unregularized F, zero in flat space up to discretization
  CHECK(std::abs(compute_F_epsilon(f, t).F) <= 1e-2 * 4 * pi * t);
  const auto d = approx_monotonicity_defect(f, s, t);
  CHECK(d.rhs < 0.0);
  CHECK(d.kernel_max <= 1.0 / 6.0);
  // lhs is zero up to the O(h^2) error of the level integrals
  CHECK(std::abs(d.lhs) <= 1e-3 * 4 * pi * t);
  CHECK_THROWS_AS(approx_monotonicity_defect(f, t, 2 * t_hi), DomainError);
}
