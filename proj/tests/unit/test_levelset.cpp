#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "capflow/epsilon_solver.hpp"
#include "capflow/levelset.hpp"

using namespace capflow;
using std::numbers::pi;

namespace {

// Octahedron refined n times and pushed to the sphere of radius r about c.
SurfaceMesh sphere_mesh(const Vec3& c, double r, int n) {
  SurfaceMesh m;
  m.vertices = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
  m.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (int level = 0; level < n; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.vertices.push_back((0.5 * (m.vertices[a] + m.vertices[b])).normalized());
      return mid[key] = int(m.vertices.size()) - 1;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : m.triangles) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v = c + r * v;
  return m;
}

}  // namespace

TEST_CASE("radial levels") {
  const auto pot = solve_radial(MetricSpec::flat(1.0), 2.0);
  const auto s = extract_level(pot, 0.5);
  CHECK(s.radius == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(s.total_area == doctest::Approx(16 * pi).epsilon(1e-10));
  CHECK(extract_level(pot, 0.0).radius == doctest::Approx(1.0));
  CHECK(gauss_bonnet_check(s).chi == doctest::Approx(2.0));
}

TEST_CASE("surface integrals on radial levels") {
  const auto flat = solve_radial(MetricSpec::flat(1.0), 2.0);
  const auto s = extract_level(flat, 0.5);
  CHECK(surface_integral(s, [](const SurfaceSample&) { return 1.0; }).value == doctest::Approx(16 * pi));
  CHECK(surface_integral(s, [](const SurfaceSample& x) { return x.mean_curvature * x.mean_curvature; }).value ==
        doctest::Approx(16 * pi));

  const auto schw = solve_radial(MetricSpec::schwarzschild(1.0), 2.0);
  for (double tau : {0.1, 0.5, 0.99}) {
    const auto lvl = extract_level(schw, tau);
    const double flux = surface_integral(lvl, [](const SurfaceSample& x) { return x.grad_norm; }).value;
    CHECK(flux == doctest::Approx(4 * pi).epsilon(1e-6));
  }
}

TEST_CASE("grid levels of the flat potential") {
  const auto pot = solve_radial(MetricSpec::flat(1.0), 2.0);
  double err[2];
  for (int i = 0; i < 2; ++i) {
    const double h = i == 0 ? 0.25 : 0.125;
    const auto f = sample_radial_field(pot, Lattice::centered(3.0, h));
    const auto s = extract_level(f, 0.5);
    CHECK(s.regular);
    err[i] = std::abs(s.total_area - 16 * pi);
    if (i == 1) {
      const auto gb = gauss_bonnet_check(s);
      CHECK(gb.chi == doctest::Approx(2.0).epsilon(0.025));
      CHECK(gb.components == 1);
      const double flux = surface_integral(s, [](const SurfaceSample& x) { return x.grad_norm; }).value;
      CHECK(flux == doctest::Approx(4 * pi).epsilon(0.01));
      const double willmore =
          surface_integral(s, [](const SurfaceSample& x) { return x.mean_curvature * x.mean_curvature; }).value;
      CHECK(willmore == doctest::Approx(16 * pi).epsilon(0.01));
    }
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.5);
}

TEST_CASE("two disjoint spheres violate the connectedness expectation") {
  auto a = sphere_mesh(Vec3(-3, 0, 0), 1.0, 3);
  const auto b = sphere_mesh(Vec3(3, 0, 0), 1.0, 3);
  const int offset = int(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (auto t : b.triangles) a.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  const auto gb = gauss_bonnet_check(surface_from_mesh(std::move(a)));
  CHECK(gb.chi == doctest::Approx(4.0));
  CHECK(gb.components == 2);
  CHECK_FALSE(gb.expectation_ok);

  const auto one = gauss_bonnet_check(surface_from_mesh(sphere_mesh(Vec3::Zero(), 2.0, 3)));
  CHECK(one.chi == doctest::Approx(2.0));
  CHECK(one.expectation_ok);
}

TEST_CASE("coarea: volume of a shell against stacked level areas") {
  // flat p = 2: integral of |grad u| over {0.5 < u < 0.6} equals the integral of area(tau) dtau
  const auto pot = solve_radial(MetricSpec::flat(1.0), 2.0);
  const auto f = sample_radial_field(pot, Lattice::centered(3.0, 0.0625));
  const Lattice& L = f.lattice;
  double volume = 0.0;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const double u = f.at(i, j, k);
        if (u > 0.5 && u < 0.6 && has_jet(f, i, j, k)) volume += node_jet(f, i, j, k).grad.norm() * std::pow(L.h, 3);
      }
  double stacked = 0.0;
  const auto rule = gauss_legendre(4);
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    const double tau = 0.55 + 0.05 * rule.nodes[q];
    stacked += 0.05 * rule.weights[q] * extract_level(f, tau, ExtractOptions{false}).total_area;
  }
  CHECK(volume == doctest::Approx(stacked).epsilon(0.02));
  CHECK(stacked == doctest::Approx(4 * pi * (2.5 - 2.0)).epsilon(0.01));
}
