#pragma once

#include <span>
#include <vector>

#include "capflow/geometry.hpp"

namespace capflow {

/// Geometric radial grid: uniform in ln r from r_min to r_min * outer_ratio.
struct RadialGridOptions {
  double outer_ratio = 1e5;
  int min_intervals = 4000;
  double log_step_scale = 0.1;  // ln-step times 2/(p-1) stays below this
};

/// The radial p-capacitary potential of a rotationally symmetric metric.
///
/// Writing g = phi^4 delta, the radial equation integrates once to
/// u'(r) = c_p phi^2 (r phi^2)^{-2/(p-1)}, and u(infinity) = 1 fixes c_p.
/// Node values come from Richardson-refined Simpson sums in ln r; the part of
/// the normalization integral beyond the grid is a second-order tail series.
class RadialPotential {
 public:
  double p() const { return p_; }
  const MetricSpec& metric() const { return spec_; }
  std::span<const double> radii() const { return r_; }
  std::span<const double> values() const { return u_; }
  std::span<const double> one_minus_values() const { return w_; }
  std::span<const double> derivatives() const { return du_; }
  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }

  double capacity() const { return cap_; }
  double c_p() const { return c_; }
  double log_c_p() const { return log_c_; }
  double t_p() const { return t_p_; }
  /// Relative size of the analytic tail in the normalization integral.
  double tail_fraction() const { return tail_fraction_; }

  double u(double r) const;
  double one_minus_u(double r) const;
  double du(double r) const;
  double d2u(double r) const;
  /// Radius of the level {1 - u = omega}; omega in (1 - u(r_max), 1].
  double radius_of_one_minus(double omega) const;
  double radius_of_level(double tau) const { return radius_of_one_minus(1.0 - tau); }

 private:
  friend RadialPotential solve_radial(const MetricSpec&, double, const RadialGridOptions&);
  double log_integrand(double x) const;  // ln(f(e^x) e^x) - scale
  double local_integral(size_t i, double x) const;
  size_t interval_of(double x) const;
  void require_radius(double r) const;

  MetricSpec spec_;
  double p_ = 2.0;
  double k_ = 2.0;
  double x0_ = 0.0, dx_ = 0.0;
  double log_scale_ = 0.0;
  double total_ = 1.0;  // scaled normalization integral
  double cap_ = 0.0, c_ = 0.0, log_c_ = 0.0, t_p_ = 0.0, tail_fraction_ = 0.0;
  std::vector<double> r_, u_, w_, du_;
  std::vector<double> forward_, backward_;  // scaled partial integrals
};

RadialPotential solve_radial(const MetricSpec& spec, double p, const RadialGridOptions& opts = {});

struct RadialGeometry {
  double r;
  double u;
  double one_minus_u;
  double grad_norm;       // |grad u|_g
  double mean_curvature;  // H_g of the coordinate sphere, outward normal
  double area;            // g-area of the coordinate sphere
};

RadialGeometry radial_geometry_at(const RadialPotential& pot, double r);

double radial_capacity(const MetricSpec& spec, double p);

/// Exponent of (1-u) ~ r^{-e} fitted on the last decade of the grid, and the
/// empirical correction rate beta in (1-u) = lead * (1 + O(r^{-beta})).
struct DecayFit {
  double exponent;
  double expected;
  double relative_error;
  double beta;  // +inf when the leading term is exact
};

DecayFit fit_decay(const RadialPotential& pot);

/// Throws ParameterError unless p lies in the supported range [1.01, 2.9].
void require_supported_exponent(double p);

}  // namespace capflow
