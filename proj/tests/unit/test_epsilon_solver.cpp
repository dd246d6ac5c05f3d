#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "capflow/epsilon_solver.hpp"
#include "capflow/error.hpp"

using namespace capflow;

namespace {

double max_oracle_error(const GridField& f, const RadialPotential& pot) {
  double err = 0.0;
  const Lattice& L = f.lattice;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i)
        if (f.in_domain(i, j, k)) err = std::max(err, std::abs(f.at(i, j, k) - pot.u(L.position(i, j, k).norm())));
  return err;
}

GridConfig annulus(double h, double r_in, double r_out) {
  GridConfig c;
  c.spacing = h;
  c.inner_radius = r_in;
  c.outer_radius = r_out;
  return c;
}

}  // namespace

TEST_CASE("p=2 flat annulus converges at second order") {
  const auto spec = MetricSpec::flat(1.0);
  const auto pot = solve_radial(spec, 2.0);
  const auto bc = OuterBoundary::oracle(pot, 4.0);
  const auto coarse = solve_regularized(spec, 2.0, 0.1, annulus(0.25, 1.0, 4.0), bc);
  const auto fine = solve_regularized(spec, 2.0, 0.1, annulus(0.125, 1.0, 4.0), bc);
  CHECK(coarse.log.converged);
  CHECK(fine.log.converged);
  const double e1 = max_oracle_error(coarse, pot), e2 = max_oracle_error(fine, pot);
  CHECK(e2 < 1e-2);
  CHECK(std::log2(e1 / e2) >= 1.5);
}

TEST_CASE("p=2 solution does not depend on eps") {
  const auto spec = MetricSpec::flat(1.0);
  const auto bc = OuterBoundary::constant(0.75);
  const auto a = solve_regularized(spec, 2.0, 1e-3, annulus(0.25, 1.0, 4.0), bc);
  const auto b = solve_regularized(spec, 2.0, 0.5, annulus(0.25, 1.0, 4.0), bc);
  double diff = 0.0;
  for (size_t i = 0; i < a.u.size(); ++i) diff = std::max(diff, std::abs(a.u[i] - b.u[i]));
  CHECK(diff < 1e-8);
  CHECK(c_p_epsilon_boundary(a) == doctest::Approx(c_p_epsilon_boundary(b)).epsilon(1e-8));
}

TEST_CASE("schwarzschild p=2 annulus matches the oracle") {
  const auto spec = MetricSpec::schwarzschild(1.0);
  const auto pot = solve_radial(spec, 2.0);
  const auto f = solve_regularized(spec, 2.0, 1e-3, annulus(0.125, 0.5, 4.0),
                                   OuterBoundary::constant(pot.u(4.0)));
  CHECK(f.log.converged);
  CHECK(max_oracle_error(f, pot) <= 2e-2);
  const auto cp = c_p_epsilon(f);
  CHECK(cp.boundary == doctest::Approx(1.0).epsilon(0.02));
  CHECK(cp.relative_gap <= 0.01);
}

TEST_CASE("residual of a solved field and of a perturbed one") {
  const auto spec = MetricSpec::flat(1.0);
  auto f = solve_regularized(spec, 2.5, 1e-2, annulus(0.25, 1.0, 3.0), OuterBoundary::constant(0.5));
  const auto res = residual(f);
  CHECK(res.relative <= 10 * f.tol_picard);

  const Lattice& L = f.lattice;
  size_t target = 0;
  for (size_t i = 0; i < f.u.size(); ++i) {
    const auto c = L.coords(i);
    if (f.state[i] == NodeState::Interior && std::abs(L.position(c[0], c[1], c[2]).norm() - 2.0) < 0.2) {
      target = i;
      break;
    }
  }
  const double before = res.max_abs;
  f.u[target] += 0.1;
  const auto field = residual_field(f);
  CHECK(std::abs(field[target]) > 10 * before);
}

TEST_CASE("residual of the sampled oracle shrinks with eps") {
  const auto pot = solve_radial(MetricSpec::flat(1.0), 2.5);
  const Lattice lat = Lattice::centered(3.0, 0.125);
  const auto r1 = residual(sample_radial_field(pot, lat, 0.05));
  const auto r2 = residual(sample_radial_field(pot, lat, 0.025));
  CHECK(r1.rms > 0.0);
  CHECK(r2.rms < r1.rms);
}

TEST_CASE("comparison principle") {
  const auto spec = MetricSpec::flat(1.0);
  const auto lo = solve_regularized(spec, 2.5, 1e-2, annulus(0.25, 1.0, 3.0), OuterBoundary::constant(0.4));
  const auto hi = solve_regularized(spec, 2.5, 1e-2, annulus(0.25, 1.0, 3.0), OuterBoundary::constant(0.6));
  bool ordered = true;
  for (size_t i = 0; i < lo.u.size(); ++i) {
    const bool domain = lo.state[i] == NodeState::Interior || lo.state[i] == NodeState::Pinned;
    if (domain) ordered = ordered && lo.u[i] <= hi.u[i] + 1e-12;
  }
  CHECK(ordered);
}

TEST_CASE("field files round-trip") {
  const auto spec = MetricSpec::flat(1.0);
  const auto f = solve_regularized(spec, 2.5, 1e-2, annulus(0.25, 1.0, 3.0), OuterBoundary::constant(0.5));
  const auto dir = std::filesystem::temp_directory_path();
  write_field(f, dir / "capflow_rt.bin", dir / "capflow_rt.meta", {"test"});
  const auto g = read_field(dir / "capflow_rt.bin", spec);
  CHECK(g.u == f.u);
  CHECK(g.lattice.n == f.lattice.n);
  CHECK(g.eps == f.eps);
  CHECK(g.T == f.T);
  std::ofstream(dir / "capflow_bad.bin") << "garbage";
  CHECK_THROWS_AS(read_field(dir / "capflow_bad.bin", spec), ParseError);
}

TEST_CASE("solver input validation") {
  const auto spec = MetricSpec::flat(1.0);
  CHECK_THROWS_AS(solve_regularized(spec, 2.5, 0.0, annulus(0.25, 1.0, 3.0), OuterBoundary::constant(0.5)),
                  ParameterError);
  CHECK_THROWS_AS(solve_regularized(spec, 3.5, 0.1, annulus(0.25, 1.0, 3.0), OuterBoundary::constant(0.5)),
                  ParameterError);
}
