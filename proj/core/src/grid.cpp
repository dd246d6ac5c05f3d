#include "capflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "capflow/error.hpp"

namespace capflow {

Lattice Lattice::centered(double half_width, double h) {
  if (!(h > 0.0) || !(half_width > 0.0)) throw ParameterError("lattice needs positive extent and spacing");
  const int m = static_cast<int>(std::ceil(half_width / h - 1e-9));
  Lattice lat;
  lat.h = h;
  lat.n = {2 * m + 1, 2 * m + 1, 2 * m + 1};
  lat.origin = Vec3::Constant(-m * h);
  return lat;
}

bool has_jet(const GridField& field, int i, int j, int k) {
  if (!field.lattice.valid(i, j, k) || !field.in_domain(i, j, k)) return false;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (!field.usable(i + di, j + dj, k + dk)) return false;
  return true;
}

PointJet node_jet(const GridField& field, int i, int j, int k) {
  if (!has_jet(field, i, j, k)) throw DomainError("node has no complete finite-difference neighborhood");
  const double h = field.lattice.h;
  auto v = [&](int a, int b, int c) { return field.at(i + a, j + b, k + c); };
  PointJet jet;
  jet.u = v(0, 0, 0);
  const std::array<std::array<int, 3>, 3> e{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int d = 0; d < 3; ++d) {
    const auto& o = e[d];
    const double up = v(o[0], o[1], o[2]);
    const double um = v(-o[0], -o[1], -o[2]);
    jet.grad(d) = (up - um) / (2.0 * h);
    jet.hess(d, d) = (up - 2.0 * jet.u + um) / (h * h);
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      std::array<int, 3> pa = e[a], pb = e[b];
      auto shifted = [&](int sa, int sb) {
        return v(sa * pa[0] + sb * pb[0], sa * pa[1] + sb * pb[1], sa * pa[2] + sb * pb[2]);
      };
      const double m = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h * h);
      jet.hess(a, b) = m;
      jet.hess(b, a) = m;
    }
  }
  return jet;
}

namespace {

struct Cell {
  int i, j, k;
  double fx, fy, fz;
};

Cell locate(const Lattice& lat, const Vec3& x) {
  const Vec3 s = (x - lat.origin) / lat.h;
  Cell c{};
  c.i = static_cast<int>(std::floor(s(0)));
  c.j = static_cast<int>(std::floor(s(1)));
  c.k = static_cast<int>(std::floor(s(2)));
  c.i = std::clamp(c.i, 0, lat.n[0] - 2);
  c.j = std::clamp(c.j, 0, lat.n[1] - 2);
  c.k = std::clamp(c.k, 0, lat.n[2] - 2);
  c.fx = s(0) - c.i;
  c.fy = s(1) - c.j;
  c.fz = s(2) - c.k;
  if (c.fx < -1e-9 || c.fx > 1 + 1e-9 || c.fy < -1e-9 || c.fy > 1 + 1e-9 || c.fz < -1e-9 ||
      c.fz > 1 + 1e-9) {
    throw DomainError("interpolation point outside the lattice");
  }
  return c;
}

}  // namespace

PointJet interpolate_jet(const GridField& field, const Vec3& x) {
  const Cell c = locate(field.lattice, x);
  PointJet out;
  out.u = 0.0;
  for (int dk = 0; dk <= 1; ++dk)
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        const double w = (di ? c.fx : 1 - c.fx) * (dj ? c.fy : 1 - c.fy) * (dk ? c.fz : 1 - c.fz);
        if (w == 0.0) continue;
        const PointJet jet = node_jet(field, c.i + di, c.j + dj, c.k + dk);
        out.u += w * jet.u;
        out.grad += w * jet.grad;
        out.hess += w * jet.hess;
      }
  return out;
}

double interpolate_value(const GridField& field, const Vec3& x) {
  const Cell c = locate(field.lattice, x);
  double s = 0.0;
  for (int dk = 0; dk <= 1; ++dk)
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        const double w = (di ? c.fx : 1 - c.fx) * (dj ? c.fy : 1 - c.fy) * (dk ? c.fz : 1 - c.fz);
        s += w * field.at(c.i + di, c.j + dj, c.k + dk);
      }
  return s;
}

}  // namespace capflow
