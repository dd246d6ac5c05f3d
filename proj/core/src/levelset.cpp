#include "capflow/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "capflow/error.hpp"

namespace capflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LevelSurface radial_sphere(const RadialPotential& pot, double r, double level) {
  const RadialGeometry geo = radial_geometry_at(pot, r);
  LevelSurface s;
  s.level = level;
  s.radial = true;
  s.radius = r;
  SurfaceSample sample;
  sample.position = Vec3(r, 0.0, 0.0);
  sample.weight = geo.area;
  sample.grad_norm = geo.grad_norm;
  sample.mean_curvature = geo.mean_curvature;
  sample.u = level;
  s.samples.push_back(sample);
  s.total_area = geo.area;
  s.regular = geo.grad_norm > 0.0;
  return s;
}

// Six tetrahedra sharing the cube diagonal 0-7; corner bit layout x + 2y + 4z.
constexpr std::array<std::array<int, 4>, 6> kKuhn{{
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}}};

class MeshBuilder {
 public:
  MeshBuilder(const GridField& field, double tau) : field_(field), tau_(tau) {}

  void add_cell(int i, int j, int k) {
    const Lattice& lat = field_.lattice;
    std::array<size_t, 8> node;
    std::array<double, 8> val;
    double lo = 1e300, hi = -1e300;
    for (int b = 0; b < 8; ++b) {
      const int ci = i + (b & 1), cj = j + ((b >> 1) & 1), ck = k + ((b >> 2) & 1);
      if (!field_.usable(ci, cj, ck)) return;
      node[b] = lat.index(ci, cj, ck);
      val[b] = field_.u[node[b]];
      lo = std::min(lo, val[b]);
      hi = std::max(hi, val[b]);
    }
    if (!(lo <= tau_ && hi > tau_)) return;
    for (const auto& tet : kKuhn) {
      std::array<int, 4> above{}, below{};
      int na = 0, nb = 0;
      for (int c : tet) {
        if (val[c] > tau_) above[na++] = c;
        else below[nb++] = c;
      }
      if (na == 0 || nb == 0) continue;
      auto vtx = [&](int a, int b) { return vertex(node[a], node[b], val[a], val[b]); };
      if (na == 1) {
        tri(vtx(above[0], below[0]), vtx(above[0], below[1]), vtx(above[0], below[2]));
      } else if (nb == 1) {
        tri(vtx(below[0], above[0]), vtx(below[0], above[1]), vtx(below[0], above[2]));
      } else {
        const int a0 = vtx(above[0], below[0]), a1 = vtx(above[0], below[1]);
        const int b1 = vtx(above[1], below[1]), b0 = vtx(above[1], below[0]);
        tri(a0, a1, b1);
        tri(a0, b1, b0);
      }
    }
  }

  SurfaceMesh take() { return std::move(mesh_); }

 private:
  int vertex(size_t a, size_t b, double va, double vb) {
    if (a > b) { std::swap(a, b); std::swap(va, vb); }
    const std::uint64_t key = static_cast<std::uint64_t>(a) * field_.lattice.size() + b;
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const double t = std::clamp((tau_ - va) / (vb - va), 1e-6, 1.0 - 1e-6);
    const auto ca = field_.lattice.coords(a), cb = field_.lattice.coords(b);
    const Vec3 xa = field_.lattice.position(ca[0], ca[1], ca[2]);
    const Vec3 xb = field_.lattice.position(cb[0], cb[1], cb[2]);
    const int id = static_cast<int>(mesh_.vertices.size());
    mesh_.vertices.push_back(xa + t * (xb - xa));
    index_.emplace(key, id);
    return id;
  }
  void tri(int a, int b, int c) { mesh_.triangles.push_back({a, b, c}); }

  const GridField& field_;
  double tau_;
  SurfaceMesh mesh_;
  std::unordered_map<std::uint64_t, int> index_;
};

GridField stride_two(const GridField& f) {
  GridField c = f;
  const Lattice& L = f.lattice;
  std::array<int, 3> off{}, n{};
  for (int a = 0; a < 3; ++a) {
    // Keep the node nearest the origin on the coarse lattice.
    const int centre = static_cast<int>(std::lround(-L.origin(a) / L.h));
    off[a] = ((centre % 2) + 2) % 2;
    n[a] = (L.n[a] - off[a] + 1) / 2;
  }
  c.lattice.h = 2.0 * L.h;
  c.lattice.n = n;
  c.lattice.origin = L.position(off[0], off[1], off[2]);
  c.u.assign(c.lattice.size(), 0.0);
  c.state.assign(c.lattice.size(), NodeState::Hole);
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const size_t src = L.index(off[0] + 2 * i, off[1] + 2 * j, off[2] + 2 * k);
        const size_t dst = c.lattice.index(i, j, k);
        c.u[dst] = f.u[src];
        c.state[dst] = f.state[src];
      }
  return c;
}

double triangle_g_area(const MetricSpec& metric, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Mat3 g = metric_components(metric, (a + b + c) / 3.0);
  const double g11 = e1.dot(g * e1), g22 = e2.dot(g * e2), g12 = e1.dot(g * e2);
  return 0.5 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
}

}  // namespace

JetLevelGeometry jet_level_geometry(const MetricSpec& metric, const Vec3& x, const PointJet& jet) {
  const PointGeometry pg = metric_at(metric, x);
  const Vec3 up = pg.g_inv * jet.grad;
  const double grad2 = jet.grad.dot(up);
  JetLevelGeometry out{std::sqrt(std::max(grad2, 0.0)), 0.0};
  if (!(out.grad_norm > 0.0)) return out;
  Mat3 cov = jet.hess;
  for (int k = 0; k < 3; ++k) cov -= jet.grad(k) * pg.christoffel[k];
  const double lap = (pg.g_inv.cwiseProduct(cov)).sum();
  const double nn = up.dot(cov * up) / grad2;
  out.mean_curvature = (lap - nn) / out.grad_norm;
  return out;
}

double max_gradient_norm(const GridField& field) {
  const Lattice& L = field.lattice;
  double best = 0.0;
  for (int k = 1; k + 1 < L.n[2]; ++k)
    for (int j = 1; j + 1 < L.n[1]; ++j)
      for (int i = 1; i + 1 < L.n[0]; ++i) {
        if (!field.in_domain(i, j, k)) continue;
        if (!field.usable(i + 1, j, k) || !field.usable(i - 1, j, k) || !field.usable(i, j + 1, k) ||
            !field.usable(i, j - 1, k) || !field.usable(i, j, k + 1) || !field.usable(i, j, k - 1)) {
          continue;
        }
        const Vec3 d((field.at(i + 1, j, k) - field.at(i - 1, j, k)),
                     (field.at(i, j + 1, k) - field.at(i, j - 1, k)),
                     (field.at(i, j, k + 1) - field.at(i, j, k - 1)));
        const Vec3 grad = d / (2.0 * L.h);
        const Mat3 g = metric_components(field.metric, L.position(i, j, k));
        best = std::max(best, std::sqrt(grad.dot(g.inverse() * grad)));
      }
  return best;
}

LevelSurface extract_level(const RadialPotential& pot, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("level outside [0,1)");
  const double r = tau == 0.0 ? pot.r_min() : pot.radius_of_level(tau);
  return radial_sphere(pot, r, tau);
}

LevelSurface extract_level_one_minus(const RadialPotential& pot, double omega) {
  if (!(omega > 0.0 && omega <= 1.0)) throw DomainError("level outside [0,1)");
  return radial_sphere(pot, pot.radius_of_one_minus(omega), 1.0 - omega);
}

LevelSurface extract_level(const GridField& field, double tau, const ExtractOptions& opts) {
  const Lattice& L = field.lattice;
  const double floor_abs = opts.regularity_floor * max_gradient_norm(field);
  MeshBuilder builder(field, tau);
  for (int k = 0; k + 1 < L.n[2]; ++k)
    for (int j = 0; j + 1 < L.n[1]; ++j)
      for (int i = 0; i + 1 < L.n[0]; ++i) builder.add_cell(i, j, k);

  LevelSurface s;
  s.level = tau;
  s.mesh = builder.take();
  if (s.mesh.triangles.empty()) throw GeometryError("level set is empty on this grid");
  s.samples.resize(s.mesh.vertices.size());
  for (size_t v = 0; v < s.mesh.vertices.size(); ++v) {
    const Vec3& x = s.mesh.vertices[v];
    PointJet jet;
    try {
      jet = interpolate_jet(field, x);
    } catch (const DomainError&) {
      throw GeometryError("level set reaches the boundary layer of the grid");
    }
    const JetLevelGeometry geo = jet_level_geometry(field.metric, x, jet);
    SurfaceSample& smp = s.samples[v];
    smp.position = x;
    smp.grad_norm = geo.grad_norm;
    smp.mean_curvature = geo.mean_curvature;
    smp.u = tau;
    if (!(geo.grad_norm > floor_abs)) s.regular = false;
  }
  for (const auto& t : s.mesh.triangles) {
    const double a = triangle_g_area(field.metric, s.mesh.vertices[t[0]], s.mesh.vertices[t[1]],
                                     s.mesh.vertices[t[2]]);
    for (int c : t) s.samples[c].weight += a / 3.0;
    s.total_area += a;
  }
  if (opts.with_coarse) {
    ExtractOptions sub = opts;
    sub.with_coarse = false;
    try {
      s.coarse = std::make_shared<LevelSurface>(extract_level(stride_two(field), tau, sub));
    } catch (const Error&) {
      s.coarse.reset();
    }
  }
  return s;
}

LevelSurface surface_from_mesh(SurfaceMesh mesh, double level) {
  LevelSurface s;
  s.level = level;
  s.mesh = std::move(mesh);
  s.samples.resize(s.mesh.vertices.size());
  for (size_t v = 0; v < s.samples.size(); ++v) {
    s.samples[v].position = s.mesh.vertices[v];
    s.samples[v].u = level;
  }
  for (const auto& t : s.mesh.triangles) {
    const Vec3 &a = s.mesh.vertices[t[0]], &b = s.mesh.vertices[t[1]], &c = s.mesh.vertices[t[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    for (int v : t) s.samples[v].weight += area / 3.0;
    s.total_area += area;
  }
  return s;
}

IntegralResult surface_integral(const LevelSurface& surface,
                                const std::function<double(const SurfaceSample&)>& integrand) {
  if (surface.samples.empty()) throw GeometryError("surface has no samples");
  auto sum = [&](const LevelSurface& s) {
    double acc = 0.0;
    for (size_t i = 0; i < s.samples.size(); ++i) {
      const double f = integrand(s.samples[i]);
      if (!std::isfinite(f)) {
        throw NumericalError("integrand is not finite at sample " + std::to_string(i));
      }
      acc += s.samples[i].weight * f;
    }
    return acc;
  };
  IntegralResult out;
  out.value = sum(surface);
  if (surface.coarse) out.error_estimate = std::abs(out.value - sum(*surface.coarse)) / 3.0;
  return out;
}

EulerEstimate gauss_bonnet_check(const LevelSurface& surface) {
  EulerEstimate est;
  if (surface.radial) return est;
  const auto& V = surface.mesh.vertices;
  const auto& F = surface.mesh.triangles;
  if (F.empty()) throw GeometryError("surface has no triangles");
  std::vector<double> angle(V.size(), 0.0);
  std::vector<char> used(V.size(), 0);
  std::vector<int> parent(V.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& t : F) {
    for (int c = 0; c < 3; ++c) {
      const Vec3& o = V[t[c]];
      const Vec3 e1 = V[t[(c + 1) % 3]] - o, e2 = V[t[(c + 2) % 3]] - o;
      const double cr = e1.cross(e2).norm();
      if (!(cr > 1e-14 * e1.norm() * e2.norm()) || cr == 0.0) {
        throw GeometryError("degenerate triangle in level mesh");
      }
      angle[t[c]] += std::atan2(cr, e1.dot(e2));
      used[t[c]] = 1;
    }
    parent[find(t[0])] = find(t[1]);
    parent[find(t[1])] = find(t[2]);
  }
  double defect = 0.0;
  int comps = 0;
  for (size_t v = 0; v < V.size(); ++v) {
    if (!used[v]) continue;
    defect += kTwoPi - angle[v];
    if (find(static_cast<int>(v)) == static_cast<int>(v)) ++comps;
  }
  est.chi = defect / kTwoPi;
  est.components = comps;
  est.expectation_ok = comps == 1 && 4.0 * std::numbers::pi - kTwoPi * est.chi >= -0.5;
  return est;
}

void write_mesh(const LevelSurface& surface, std::ostream& os) {
  os << "# level " << surface.level << "\n";
  os << "# vertices " << surface.samples.size() << " faces " << surface.mesh.triangles.size() << "\n";
  os.precision(12);
  for (const auto& s : surface.samples) {
    os << "v " << s.position(0) << ' ' << s.position(1) << ' ' << s.position(2) << ' ' << s.grad_norm
       << ' ' << s.mean_curvature << ' ' << s.weight << "\n";
  }
  for (const auto& t : surface.mesh.triangles) {
    os << "f " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  }
}

}  // namespace capflow
