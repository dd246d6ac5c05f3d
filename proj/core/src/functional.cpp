#include "capflow/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>

#include "capflow/error.hpp"

namespace capflow {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_p(double p) {
  if (!(p > 1.0 && p < 3.0)) throw ParameterError("exponent p must lie in (1,3)");
}

MonotonicityVerdict judge(const std::vector<FunctionalValue>& rows, double tol_mono) {
  MonotonicityVerdict v;
  if (rows.empty()) return v;
  double scale = kFourPi * rows.front().t;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.F));
  v.tolerance = tol_mono * scale;
  v.min_increment = std::numeric_limits<double>::infinity();
  const FunctionalValue* prev = nullptr;
  for (const auto& r : rows) {
    if (!r.regular) continue;
    if (prev) v.min_increment = std::min(v.min_increment, r.F - prev->F);
    prev = &r;
  }
  if (!std::isfinite(v.min_increment)) v.min_increment = 0.0;
  v.monotone = v.min_increment >= -v.tolerance;
  const size_t n = rows.size();
  if (n >= 2) {
    const auto& a = rows[n - 2];
    const auto& b = rows[n - 1];
    const double xa = 1.0 / a.t, xb = 1.0 / b.t;
    v.tail_estimate = b.F + (b.F - a.F) * xb / (xa - xb);
  } else {
    v.tail_estimate = rows.back().F;
  }
  return v;
}

}  // namespace

Reparametrization::Reparametrization(double p, double c) : p_(p), c_(c) {
  require_p(p);
  if (!(c > 0.0)) throw ParameterError("normalization constant c must be positive");
  e_ = (p - 1.0) / (3.0 - p);
  t_p_ = std::exp(e_ * (std::log(e_) + std::log(c)));
}

double Reparametrization::one_minus_alpha(double t) const {
  if (!(t >= t_p_ * (1.0 - 1e-13))) throw DomainError("t lies below t_p");
  if (t <= t_p_) return 1.0;
  return std::exp((std::log(t_p_) - std::log(t)) / e_);
}

double Reparametrization::alpha(double t) const { return 1.0 - one_minus_alpha(t); }

double Reparametrization::t_of(double alpha) const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha outside [0,1)");
  return t_p_ * std::exp(-e_ * std::log1p(-alpha));
}

double Reparametrization::t_max(double T) const {
  if (!(T > 0.0 && T < 1.0)) throw ParameterError("T must lie in (0,1)");
  return t_p_ * std::exp(-e_ * std::log1p(-T));
}

double reparam_alpha(double p, double c, double t) { return Reparametrization(p, c).alpha(t); }
double reparam_inverse(double p, double c, double alpha) { return Reparametrization(p, c).t_of(alpha); }

FunctionalValue functional_on_level(const LevelSurface& surf, double p, double c, double t,
                                    double one_minus_level) {
  const double lnB = std::log((3.0 - p) / (p - 1.0)) + std::log(one_minus_level);
  double area = 0.0, flux = 0.0, willmore = 0.0, gh = 0.0, gg = 0.0, qq = 0.0;
  for (size_t i = 0; i < surf.samples.size(); ++i) {
    const auto& s = surf.samples[i];
    const double H = s.mean_curvature;
    const double g = s.grad_norm > 0.0 ? std::exp(std::log(s.grad_norm) - lnB) : 0.0;
    const double w = s.weight;
    area += w;
    flux += w * std::pow(s.grad_norm, p - 1.0);
    willmore += w * H * H;
    gh += w * g * H;
    gg += w * g * g;
    qq += w * (2.0 * g - H) * (2.0 * g - H);
  }
  FunctionalValue v;
  v.t = t;
  v.alpha = 1.0 - one_minus_level;
  v.area = area;
  v.flux = flux;
  v.willmore = willmore;
  v.F = kFourPi * t - t * gh + t * gg;
  v.M = 0.25 * t * (4.0 * kFourPi - willmore);
  v.Q = 0.25 * t * qq;
  v.regular = surf.regular;
  const double scale = kFourPi * t + std::abs(v.M) + std::abs(v.Q);
  v.split_residual = std::abs(v.F - (v.M + v.Q)) / scale;
  if (!std::isfinite(v.F) || !std::isfinite(v.M) || !std::isfinite(v.Q)) {
    throw NumericalError("functional evaluation overflowed at t = " + std::to_string(t));
  }
  (void)c;
  return v;
}

FunctionalValue compute_F(const RadialPotential& pot, double t) {
  const Reparametrization rep(pot.p(), pot.c_p());
  const double omega = rep.one_minus_alpha(t);
  const LevelSurface surf = extract_level_one_minus(pot, omega);
  return functional_on_level(surf, pot.p(), pot.c_p(), t, omega);
}

FunctionalValue compute_F_epsilon(const GridField& field, double t, double c_eps) {
  const Reparametrization rep(field.p, c_eps);
  if (!(t < rep.t_max(field.T))) throw DomainError("t beyond the eps-range of the truncated domain");
  const double omega = rep.one_minus_alpha(t);
  const double tau = 1.0 - omega;
  if (!(tau > 0.0)) throw DomainError("level at the inner boundary is not resolvable on the grid");
  const LevelSurface surf = extract_level(field, tau, ExtractOptions{false});
  return functional_on_level(surf, field.p, c_eps, t, omega);
}

FunctionalValue compute_F_epsilon(const GridField& field, double t) {
  return compute_F_epsilon(field, t, c_p_epsilon_boundary(field));
}

FunctionalValue compute_F(const GridField& field, double t) { return compute_F_epsilon(field, t); }

MonotonicityReport monotonicity_scan(const RadialPotential& pot, const std::vector<double>& t_grid,
                                     double tol_mono) {
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw ParameterError("t grid must be increasing");
  }
  MonotonicityReport rep;
  rep.p = pot.p();
  rep.c = pot.c_p();
  rep.t_p = pot.t_p();
  for (double t : t_grid) rep.rows.push_back(compute_F(pot, t));
  rep.verdict = judge(rep.rows, tol_mono);
  rep.verdict.boundary_value = compute_F(pot, pot.t_p()).F;
  return rep;
}

MonotonicityReport monotonicity_scan(const GridField& field, const std::vector<double>& t_grid,
                                     double tol_mono) {
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw ParameterError("t grid must be increasing");
  }
  MonotonicityReport rep;
  rep.p = field.p;
  rep.eps = field.eps;
  rep.c = c_p_epsilon_boundary(field);
  rep.t_p = Reparametrization(field.p, rep.c).t_p();
  for (double t : t_grid) rep.rows.push_back(compute_F_epsilon(field, t, rep.c));
  rep.verdict = judge(rep.rows, tol_mono);
  rep.verdict.boundary_value = rep.rows.empty() ? 0.0 : rep.rows.front().F;
  return rep;
}

std::vector<double> make_t_grid(double t_min, double t_max, int n, bool log_spaced) {
  if (n < 1 || !(t_max >= t_min) || !(t_min > 0.0)) throw ParameterError("invalid t grid");
  std::vector<double> t(n);
  if (n == 1) { t[0] = t_min; return t; }
  for (int i = 0; i < n; ++i) {
    const double s = double(i) / (n - 1);
    t[i] = log_spaced ? t_min * std::pow(t_max / t_min, s) : t_min + s * (t_max - t_min);
  }
  t.front() = t_min;
  t.back() = t_max;
  return t;
}

DefectResult approx_monotonicity_defect(const GridField& field, double s, double t) {
  const double p = field.p, eps = field.eps;
  const double c = c_p_epsilon_boundary(field);
  const Reparametrization rep(p, c);
  if (!(rep.t_p() < s && s <= t && t < rep.t_max(field.T))) {
    throw DomainError("defect needs t_p < s <= t < t_max");
  }
  DefectResult out;
  out.s = s;
  out.t = t;
  out.lhs = compute_F_epsilon(field, t, c).F - compute_F_epsilon(field, s, c).F;

  const double a_s = rep.alpha(s), a_t = rep.alpha(t);
  const double a = (p - 1.0) / (3.0 - p);
  const double log_ca = a * std::log(c);
  const Lattice& L = field.lattice;
  const double h3 = L.h * L.h * L.h;
  double sum = 0.0;
  for (int k = 0; k < L.n[2]; ++k)
    for (int j = 0; j < L.n[1]; ++j)
      for (int i = 0; i < L.n[0]; ++i) {
        const double u = field.at(i, j, k);
        if (!(u > a_s && u < a_t) || !has_jet(field, i, j, k)) continue;
        const PointJet jet = node_jet(field, i, j, k);
        const PointGeometry pg = metric_at(field.metric, L.position(i, j, k));
        const double grad = std::sqrt(jet.grad.dot(pg.g_inv * jet.grad));
        const double kernel = eps * grad / (2.0 * (p + 1.0) * grad * grad + 3.0 * eps * eps);
        out.kernel_max = std::max(out.kernel_max, kernel);
        const double B = (3.0 - p) / (p - 1.0) * (1.0 - u);
        const double val = kernel * std::exp(log_ca - (a + 3.0) * std::log(B)) * grad * grad;
        sum += val * pg.sqrt_det_g * h3;
      }
  const double q = (p + 1.0) / (p - 1.0);
  out.rhs = -eps * q * q * sum;
  out.holds = out.lhs >= out.rhs;
  return out;
}

}  // namespace capflow
