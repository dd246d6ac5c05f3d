#include "capflow/identities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "capflow/error.hpp"
#include "capflow/epsilon_solver.hpp"

namespace capflow {

double IdentityCheck::absolute() const { return std::abs(first - second); }
double IdentityCheck::relative() const { return absolute() / scale; }
double DivYSplit::relative() const { return std::abs(div_y - (P + D)) / scale; }

namespace {

// Jet plus 1 - u carried separately so B stays accurate far out.
struct Jet {
  double u = 0.0;
  double w = 1.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

struct Constants {
  double p;
  double eps;
  double c;
  double a() const { return (p - 1.0) / (3.0 - p); }
  double B(double w) const { return (3.0 - p) / (p - 1.0) * w; }
};

// Covariant quantities of u at a point.
struct Local {
  double grad_norm;
  Vec3 grad_up;      // g^{ij} u_j
  Vec3 dgrad_up;     // raised gradient of |grad u|
  double laplacian;
  double normal_dgrad;  // <grad |grad u|, grad u>
  double dgrad_sq;      // |grad |grad u||^2
  double hess_sq;       // |hess u|^2
  double H;
  double h_sq;
  double ricci_nn;
  double R;
};

Local local_quantities(const PointGeometry& pg, const Jet& j) {
  Mat3 hess = j.hess;
  for (int k = 0; k < 3; ++k) hess -= pg.christoffel[k] * j.grad[k];
  Local L;
  L.grad_up = pg.g_inv * j.grad;
  L.grad_norm = std::sqrt(j.grad.dot(L.grad_up));
  if (!(L.grad_norm > kCriticalFloor)) throw DomainError("point is too close to a critical point");
  const Vec3 dgrad = hess * L.grad_up / L.grad_norm;
  L.dgrad_up = pg.g_inv * dgrad;
  L.dgrad_sq = dgrad.dot(L.dgrad_up);
  L.normal_dgrad = dgrad.dot(L.grad_up);
  const Mat3 mixed = pg.g_inv * hess;
  L.laplacian = mixed.trace();
  L.hess_sq = (mixed * mixed).trace();
  const Vec3 nu_up = L.grad_up / L.grad_norm;
  const Vec3 nu_down = j.grad / L.grad_norm;
  const Mat3 proj = Mat3::Identity() - nu_up * nu_down.transpose();
  const Mat3 h = proj * mixed * proj / L.grad_norm;
  L.H = h.trace();
  L.h_sq = (h * h).trace();
  L.ricci_nn = pg.ricci_form(nu_up);
  L.R = pg.scalar_curvature;
  return L;
}

// Contravariant X (or Y when with_first is false) at a point.
Vec3 vector_field(const PointGeometry& pg, const Jet& j, const Constants& k, bool with_first) {
  const Local L = local_quantities(pg, j);
  const double B = k.B(j.w);
  const double a = k.a();
  const double pref = std::exp(a * (std::log(k.c) - std::log(B)));
  Vec3 v = (L.dgrad_up - L.laplacian / L.grad_norm * L.grad_up) / B +
           L.grad_norm * L.grad_up / (B * B);
  if (with_first) {
    const double ge = std::sqrt(L.grad_norm * L.grad_norm + k.eps * k.eps);
    v += std::pow(ge, k.p - 2.0) * L.grad_up / std::pow(k.c, k.p - 1.0);
  }
  return pref * v;
}

struct Pointwise {
  double grad_norm;
  double div_x_geometric, div_x_scale;
  double kato_lhs, kato_rhs, kato_scale;
  double H, H_pde;
  double P, D, split_scale;
};

Pointwise pointwise(const PointGeometry& pg, const Jet& j, const Constants& k) {
  const Local L = local_quantities(pg, j);
  const double p = k.p, eps = k.eps, a = k.a();
  const double g = L.grad_norm, g2 = g * g;
  const double ge2 = g2 + eps * eps;
  const double B = k.B(j.w);
  const double pref = std::exp(a * std::log(k.c) - (a + 1.0) * std::log(B)) * g;
  const double normal_sq = L.normal_dgrad * L.normal_dgrad / g2;
  const double tangential_sq = std::max(0.0, L.dgrad_sq - normal_sq);
  const double ring_h_sq = L.h_sq - 0.5 * L.H * L.H;
  const double R_sigma = L.R - 2.0 * L.ricci_nn + L.H * L.H - L.h_sq;

  Pointwise out;
  out.grad_norm = g;
  const double terms[] = {std::pow(g, p - 1.0) / std::pow(k.c, p - 1.0),
                          -0.5 * R_sigma,
                          tangential_sq / g2,
                          0.5 * L.R,
                          0.5 * ring_h_sq,
                          (5.0 - p) / (p - 1.0) * std::pow(g / B - 0.5 * L.H, 2)};
  double sum = 0.0, mag = 0.0;
  for (double t : terms) {
    sum += t;
    mag += std::abs(t);
  }
  out.div_x_geometric = pref * sum;
  out.div_x_scale = pref * mag;

  const double q = 0.5 * (p - 1.0) * (p - 1.0);
  out.kato_lhs = L.hess_sq - (1.0 + q) * L.dgrad_sq;
  out.kato_rhs = g2 * ring_h_sq + (1.0 - q) * tangential_sq;
  out.kato_scale = L.hess_sq;

  out.H = L.H;
  out.H_pde = -((p - 1.0) * g2 + eps * eps) / ge2 * L.normal_dgrad / g2;

  const double n2 = L.normal_dgrad * L.normal_dgrad / (ge2 * ge2);
  const double P_terms[] = {tangential_sq / g2, ring_h_sq, 0.5 * (p - 1.0) * (3.0 - p) * n2,
                            eps * eps * (2.0 * g2 + eps * eps) / (2.0 * g2 * g2) * n2};
  const double D_terms[] = {
      L.ricci_nn, (p - 1.0) * (5.0 - p) / ((3.0 - p) * (3.0 - p)) * g2 / (j.w * j.w),
      ((5.0 - p) * (p - 1.0) * g2 + (p + 1.0) * eps * eps) / ((3.0 - p) * ge2) * L.normal_dgrad /
          (j.w * g)};
  double P = 0.0, D = 0.0, split_mag = 0.0;
  for (double t : P_terms) {
    P += t;
    split_mag += std::abs(t);
  }
  for (double t : D_terms) {
    D += t;
    split_mag += std::abs(t);
  }
  out.P = pref * P;
  out.D = pref * D;
  out.split_scale = pref * split_mag;
  return out;
}

PointIdentities assemble(const Vec3& x, const Pointwise& pw, double div_x, double div_y) {
  PointIdentities r;
  r.x = x;
  r.grad_norm = pw.grad_norm;
  r.div_x = {div_x, pw.div_x_geometric, pw.div_x_scale};
  r.kato = {pw.kato_lhs, pw.kato_rhs, pw.kato_scale};
  r.mean_curvature = {pw.H, pw.H_pde, std::abs(pw.H) + std::abs(pw.H_pde)};
  r.div_y.P = pw.P;
  r.div_y.D = pw.D;
  r.div_y.div_y = div_y;
  r.div_y.scale = pw.split_scale;
  r.div_y.p_nonnegative = pw.P >= 0.0;
  return r;
}

Jet radial_jet(const RadialPotential& pot, const Vec3& y) {
  const double r = y.norm();
  const Vec3 n = y / r;
  const double d1 = pot.du(r), d2 = pot.d2u(r);
  Jet j;
  j.u = pot.u(r);
  j.w = pot.one_minus_u(r);
  j.grad = d1 * n;
  j.hess = d2 * n * n.transpose() + d1 / r * (Mat3::Identity() - n * n.transpose());
  return j;
}

// (1/sqrt g) d_i (sqrt g V^i) from a callable, fourth order.
template <class F>
double divergence(const F& field, const MetricSpec& spec, const Vec3& x, double delta) {
  auto flux = [&](const Vec3& y, int i) {
    return metric_at(spec, y).sqrt_det_g * field(y)[i];
  };
  double div = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    auto central = [&](double d) { return (flux(x + d * e, i) - flux(x - d * e, i)) / (2.0 * d); };
    div += (4.0 * central(0.5 * delta) - central(delta)) / 3.0;
  }
  return div / metric_at(spec, x).sqrt_det_g;
}

}  // namespace

PointIdentities identities_at(const RadialPotential& pot, const Vec3& x) {
  const MetricSpec& spec = pot.metric();
  const double r = x.norm();
  if (!(r > pot.r_min() * (1.0 + 1e-6))) throw DomainError("identity point on or inside the horizon");
  const Constants k{pot.p(), 0.0, pot.c_p()};
  const double delta = std::min(2e-3 * r, 0.5 * (r - pot.r_min()));
  const Pointwise pw = pointwise(metric_at(spec, x), radial_jet(pot, x), k);
  auto field = [&](bool with_first) {
    return [&, with_first](const Vec3& y) {
      return vector_field(metric_at(spec, y), radial_jet(pot, y), k, with_first);
    };
  };
  const double div_x = divergence(field(true), spec, x, delta);
  const double div_y = divergence(field(false), spec, x, delta);
  return assemble(x, pw, div_x, div_y);
}

PointIdentities identities_at(const GridField& field, int i, int j, int k, double c) {
  const Lattice& L = field.lattice;
  const Constants kc{field.p, field.eps, c};
  auto jet_at = [&](int a, int b, int d) {
    if (!has_jet(field, a, b, d)) throw DomainError("identity stencil leaves the usable lattice");
    const PointJet pj = node_jet(field, a, b, d);
    Jet jt;
    jt.u = pj.u;
    jt.w = 1.0 - pj.u;
    jt.grad = pj.grad;
    jt.hess = pj.hess;
    return jt;
  };
  const Vec3 x = L.position(i, j, k);
  const PointGeometry pg = metric_at(field.metric, x);
  const Pointwise pw = pointwise(pg, jet_at(i, j, k), kc);
  double div_x = 0.0, div_y = 0.0;
  for (int dir = 0; dir < 3; ++dir) {
    std::array<int, 3> lo{i, j, k}, hi{i, j, k};
    lo[dir] -= 1;
    hi[dir] += 1;
    const PointGeometry g_lo = metric_at(field.metric, L.position(lo[0], lo[1], lo[2]));
    const PointGeometry g_hi = metric_at(field.metric, L.position(hi[0], hi[1], hi[2]));
    const Jet j_lo = jet_at(lo[0], lo[1], lo[2]);
    const Jet j_hi = jet_at(hi[0], hi[1], hi[2]);
    const Vec3 x_lo = vector_field(g_lo, j_lo, kc, true), x_hi = vector_field(g_hi, j_hi, kc, true);
    const Vec3 y_lo = vector_field(g_lo, j_lo, kc, false), y_hi = vector_field(g_hi, j_hi, kc, false);
    div_x += (g_hi.sqrt_det_g * x_hi[dir] - g_lo.sqrt_det_g * x_lo[dir]) / (2.0 * L.h);
    div_y += (g_hi.sqrt_det_g * y_hi[dir] - g_lo.sqrt_det_g * y_lo[dir]) / (2.0 * L.h);
  }
  return assemble(x, pw, div_x / pg.sqrt_det_g, div_y / pg.sqrt_det_g);
}

IdentityCheck divX_residual(const RadialPotential& pot, const Vec3& x) {
  return identities_at(pot, x).div_x;
}

IdentityCheck kato_residual(const RadialPotential& pot, const Vec3& x) {
  return identities_at(pot, x).kato;
}

DivYSplit div_y_split(const RadialPotential& pot, const Vec3& x) {
  return identities_at(pot, x).div_y;
}

PointIdentities sampled_identities(const RadialPotential& pot, const Vec3& x, double h) {
  Lattice lat;
  lat.h = h;
  lat.n = {7, 7, 7};
  lat.origin = x - 3.0 * h * Vec3::Ones();
  const GridField f = sample_radial_field(pot, lat, 0.0);
  if (!f.in_domain(3, 3, 3)) throw DomainError("sample point outside the manifold");
  return identities_at(f, 3, 3, 3, pot.c_p());
}

RefinementStudy identity_refinement(const RadialPotential& pot, std::span<const Vec3> points,
                                    double h) {
  if (points.empty()) throw ParameterError("refinement study needs at least one point");
  RefinementStudy s;
  s.h_coarse = h;
  s.h_fine = 0.5 * h;
  auto rms = [&](double hh, double& dx, double& ka, double& dy, double& dmax) {
    double sx = 0.0, sk = 0.0, sy = 0.0;
    for (const Vec3& x : points) {
      const PointIdentities id = sampled_identities(pot, x, hh);
      sx += std::pow(id.div_x.relative(), 2);
      sk += std::pow(id.kato.relative(), 2);
      sy += std::pow(id.div_y.relative(), 2);
      dmax = std::max(dmax, std::abs(id.div_y.D));
      s.p_nonnegative = s.p_nonnegative && id.div_y.p_nonnegative;
    }
    const double n = double(points.size());
    dx = std::sqrt(sx / n);
    ka = std::sqrt(sk / n);
    dy = std::sqrt(sy / n);
  };
  rms(s.h_coarse, s.div_x_coarse, s.kato_coarse, s.div_y_coarse, s.max_abs_D_coarse);
  rms(s.h_fine, s.div_x_fine, s.kato_fine, s.div_y_fine, s.max_abs_D_fine);
  auto order = [](double coarse, double fine) {
    if (!(fine > 0.0)) return std::numeric_limits<double>::infinity();
    return std::log2(coarse / fine);
  };
  s.div_x_order = order(s.div_x_coarse, s.div_x_fine);
  s.kato_order = order(s.kato_coarse, s.kato_fine);
  s.div_y_order = order(s.div_y_coarse, s.div_y_fine);
  return s;
}

std::vector<Vec3> random_points(unsigned seed, int n, double r_lo, double r_hi) {
  if (!(r_lo > 0.0 && r_hi > r_lo) || n < 0) throw ParameterError("invalid sampling shell");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, unit(rng));
    const double z = 2.0 * unit(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double s = std::sqrt(1.0 - z * z);
    pts.emplace_back(r * s * std::cos(phi), r * s * std::sin(phi), r * z);
  }
  return pts;
}

}  // namespace capflow
