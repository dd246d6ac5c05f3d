#include "capflow/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "capflow/error.hpp"
#include "capflow/quadrature.hpp"

namespace capflow {

namespace {

constexpr double kMinP = 1.01;
constexpr double kMaxP = 2.9;

// Simpson on [a, b] refined once and Richardson-corrected.
template <class F>
double simpson_richardson(const F& f, double a, double b, double fa, double fb) {
  const double h = b - a;
  const double fm = f(0.5 * (a + b));
  const double s1 = h / 6.0 * (fa + 4.0 * fm + fb);
  const double s2 = h / 12.0 * (fa + 4.0 * f(a + 0.25 * h) + 2.0 * fm + 4.0 * f(a + 0.75 * h) + fb);
  return s2 + (s2 - s1) / 15.0;
}

}  // namespace

void require_supported_exponent(double p) {
  if (!(p > 1.0 && p < 3.0)) throw ParameterError("exponent p must lie in (1,3)");
  if (p < kMinP || p > kMaxP) throw ParameterError("exponent p outside supported range [1.01, 2.9]");
}

double RadialPotential::log_integrand(double x) const {
  const double r = std::exp(x);
  const double phi = spec_.profile().phi(r);
  return (2.0 - 2.0 * k_) * std::log(phi) + (1.0 - k_) * x - log_scale_;
}

double RadialPotential::local_integral(size_t i, double x) const {
  const double xi = x0_ + i * dx_;
  if (x <= xi) return 0.0;
  auto g = [this](double s) { return std::exp(log_integrand(s)); };
  return simpson_richardson(g, xi, x, g(xi), g(x));
}

size_t RadialPotential::interval_of(double x) const {
  const double s = (x - x0_) / dx_;
  const size_t n = r_.size() - 1;
  if (s <= 0.0) return 0;
  return std::min(static_cast<size_t>(s), n - 1);
}

void RadialPotential::require_radius(double r) const {
  if (!(r >= r_.front() * (1.0 - 1e-12))) throw DomainError("radius below r_min");
  if (!(r <= r_.back() * (1.0 + 1e-12))) throw DomainError("radius beyond the solved grid");
}

double RadialPotential::u(double r) const {
  require_radius(r);
  const double x = std::log(std::max(r, r_.front()));
  const size_t i = interval_of(x);
  return (forward_[i] + local_integral(i, x)) / total_;
}

double RadialPotential::one_minus_u(double r) const {
  require_radius(r);
  const double x = std::log(std::max(r, r_.front()));
  const size_t i = interval_of(x);
  return (backward_[i] - local_integral(i, x)) / total_;
}

double RadialPotential::du(double r) const {
  require_radius(r);
  const double phi = spec_.profile().phi(r);
  const double lf = 2.0 * std::log(phi) - k_ * std::log(r * phi * phi);
  return std::exp(log_c_ + lf);
}

double RadialPotential::d2u(double r) const {
  const auto& prof = spec_.profile();
  const double q = prof.dphi(r) / prof.phi(r);
  return du(r) * ((2.0 - 2.0 * k_) * q - k_ / r);
}

double RadialPotential::radius_of_one_minus(double omega) const {
  if (!(omega <= 1.0 && omega > 0.0)) throw DomainError("level outside [0,1)");
  if (omega == 1.0) return r_.front();
  const double target = omega * total_;
  if (!(target > backward_.back())) throw DomainError("level beyond the solved grid");
  // backward_ is decreasing; locate the bracketing interval.
  auto it = std::partition_point(backward_.begin(), backward_.end(),
                                 [target](double b) { return b >= target; });
  const size_t i = static_cast<size_t>(it - backward_.begin()) - 1;
  double lo = x0_ + i * dx_, hi = lo + dx_;
  double x = lo + dx_ * (backward_[i] - target) / (backward_[i] - backward_[i + 1]);
  for (int iter = 0; iter < 100; ++iter) {
    const double h = backward_[i] - local_integral(i, x) - target;
    if (h > 0.0) lo = x; else hi = x;
    const double slope = -std::exp(log_integrand(x));
    double next = x - h / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) { x = next; break; }
    x = next;
  }
  return std::exp(x);
}

RadialPotential solve_radial(const MetricSpec& spec, double p, const RadialGridOptions& opts) {
  require_supported_exponent(p);
  if (!spec.is_radial()) throw DomainError("solve_radial needs a radial metric");
  if (!(opts.outer_ratio > 10.0) || opts.min_intervals < 16 || !(opts.log_step_scale > 0.0)) {
    throw ParameterError("invalid radial grid options");
  }
  RadialPotential pot;
  pot.spec_ = spec;
  pot.p_ = p;
  pot.k_ = 2.0 / (p - 1.0);
  const double k = pot.k_;
  const double r0 = spec.horizon_radius();
  const double span = std::log(opts.outer_ratio);
  const size_t n = std::max<size_t>(opts.min_intervals,
                                    static_cast<size_t>(std::ceil(span * k / opts.log_step_scale)));
  pot.x0_ = std::log(r0);
  pot.dx_ = span / n;
  pot.log_scale_ = 0.0;
  pot.log_scale_ = pot.log_integrand(pot.x0_);

  auto g = [&pot](double x) { return std::exp(pot.log_integrand(x)); };
  std::vector<double> piece(n);
  double gl = g(pot.x0_);
  for (size_t i = 0; i < n; ++i) {
    const double a = pot.x0_ + i * pot.dx_;
    const double b = a + pot.dx_;
    const double gr = g(b);
    piece[i] = simpson_richardson(g, a, b, gl, gr);
    gl = gr;
  }

  // Tail beyond R from phi ~ 1 + a1/r + a2/r^2 matched to phi'(R), phi''(R).
  const double R = std::exp(pot.x0_ + n * pot.dx_);
  const auto& prof = spec.profile();
  const double d1 = prof.dphi(R), d2 = prof.d2phi(R);
  const double a1 = -R * R * R * (d2 + 3.0 * d1 / R);
  const double a2 = -0.5 * R * R * R * (d1 + a1 / (R * R));
  const double beta = 2.0 - 2.0 * k;
  const double b1 = beta * a1;
  const double b2 = beta * a2 + 0.5 * beta * (beta - 1.0) * a1 * a1;
  const double series = 1.0 / (k - 1.0) + b1 / (k * R) + b2 / ((k + 1.0) * R * R);
  const double tail = std::exp((1.0 - k) * std::log(R) - pot.log_scale_) * series;

  pot.forward_.assign(n + 1, 0.0);
  pot.backward_.assign(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) pot.forward_[i + 1] = pot.forward_[i] + piece[i];
  pot.backward_[n] = tail;
  for (size_t i = n; i-- > 0;) pot.backward_[i] = pot.backward_[i + 1] + piece[i];
  pot.total_ = pot.backward_[0];
  if (!std::isfinite(pot.total_) || !(pot.total_ > 0.0) || !std::isfinite(tail) || !(tail >= 0.0)) {
    throw NumericalError("normalization integral of the radial potential diverges");
  }
  pot.tail_fraction_ = tail / pot.total_;

  pot.log_c_ = -std::log(pot.total_) - pot.log_scale_;
  pot.c_ = std::exp(pot.log_c_);
  pot.cap_ = 4.0 * std::numbers::pi * std::exp((p - 1.0) * pot.log_c_);
  const double e = (p - 1.0) / (3.0 - p);
  pot.t_p_ = std::exp(e * (std::log(e) + pot.log_c_));
  if (!std::isfinite(pot.cap_) || !std::isfinite(pot.t_p_)) {
    throw NumericalError("capacity overflow in radial solve");
  }

  pot.r_.resize(n + 1);
  pot.u_.resize(n + 1);
  pot.w_.resize(n + 1);
  pot.du_.resize(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    const double r = std::exp(pot.x0_ + i * pot.dx_);
    pot.r_[i] = r;
    pot.u_[i] = pot.forward_[i] / pot.total_;
    pot.w_[i] = pot.backward_[i] / pot.total_;
  }
  pot.r_.front() = r0;
  for (size_t i = 0; i <= n; ++i) pot.du_[i] = pot.du(pot.r_[i]);
  return pot;
}

RadialGeometry radial_geometry_at(const RadialPotential& pot, double r) {
  if (r < pot.r_min() * (1.0 - 1e-12)) throw DomainError("radius below r_min");
  const auto& prof = pot.metric().profile();
  const double phi = prof.phi(r);
  const double phi2 = phi * phi;
  RadialGeometry geo;
  geo.r = r;
  geo.u = pot.u(r);
  geo.one_minus_u = pot.one_minus_u(r);
  geo.grad_norm = pot.du(r) / phi2;
  geo.mean_curvature = (2.0 / r + 4.0 * prof.dphi(r) / phi) / phi2;
  geo.area = 4.0 * std::numbers::pi * r * r * phi2 * phi2;
  return geo;
}

double radial_capacity(const MetricSpec& spec, double p) { return solve_radial(spec, p).capacity(); }

DecayFit fit_decay(const RadialPotential& pot) {
  const auto r = pot.radii();
  const auto w = pot.one_minus_values();
  const double k = 2.0 / (pot.p() - 1.0);
  std::vector<double> lx, ly, bx, by;
  const double r_last = pot.r_max();
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= r_last / 10.0) {
      lx.push_back(std::log(r[i]));
      ly.push_back(std::log(w[i]));
    }
    // Correction rate on an intermediate window where roundoff stays small.
    if (r[i] >= 20.0 * pot.r_min() && r[i] <= 200.0 * pot.r_min()) {
      const double lead = pot.c_p() * std::pow(r[i], 1.0 - k) / (k - 1.0);
      const double rho = std::abs(w[i] / lead - 1.0);
      if (rho > 1e-11) {
        bx.push_back(std::log(r[i]));
        by.push_back(std::log(rho));
      }
    }
  }
  DecayFit fit;
  fit.exponent = -fitted_slope(lx, ly);
  fit.expected = (3.0 - pot.p()) / (pot.p() - 1.0);
  fit.relative_error = std::abs(fit.exponent - fit.expected) / fit.expected;
  fit.beta = bx.size() >= 8 ? -fitted_slope(bx, by) : std::numeric_limits<double>::infinity();
  return fit;
}

}  // namespace capflow
