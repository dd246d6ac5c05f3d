#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "capflow/quadrature.hpp"

namespace capflow {

enum class MetricKind { Flat, ConformallyFlatRadial, SampledGrid };

/// Conformal factor phi(r) and its first two radial derivatives.
struct RadialProfile {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> d2phi;
};

struct Box {
  Vec3 lo;
  Vec3 hi;
  bool contains(const Vec3& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

/// An asymptotically flat 3-metric on the exterior of a horizon sphere.
///
/// Flat and conformally flat radial metrics g = phi^4 delta are evaluated in
/// closed form. SampledGrid metrics g = delta + gamma(x) are given by a callable
/// and differentiated with centered second-order differences.
class MetricSpec {
 public:
  static MetricSpec flat(double r0);
  static MetricSpec schwarzschild(double m);
  /// phi(r) = sum_k coeffs[k] r^{-k}; coeffs[0] must be 1.
  static MetricSpec conformal_polynomial(std::vector<double> coeffs, double r_min);
  static MetricSpec conformal(RadialProfile profile, double r_min);
  static MetricSpec sampled_grid(std::function<Mat3(const Vec3&)> gamma, Box box,
                                 double horizon_radius, double tau, double holder_alpha,
                                 double fd_step);

  MetricKind kind() const { return kind_; }
  bool is_radial() const { return kind_ != MetricKind::SampledGrid; }
  bool is_flat() const { return kind_ == MetricKind::Flat; }
  double horizon_radius() const { return r_min_; }
  double decay_rate() const { return tau_; }
  double holder_exponent() const { return holder_alpha_; }
  std::optional<double> schwarzschild_mass() const { return mass_; }
  const std::vector<double>& phi_coefficients() const { return coeffs_; }
  const RadialProfile& profile() const;
  const Box& box() const;
  double fd_step() const { return fd_step_; }
  const std::function<Mat3(const Vec3&)>& gamma() const;
  std::string describe() const;

  /// Throws DomainError when x is not a point of the manifold.
  void require_in_domain(const Vec3& x) const;

 private:
  MetricKind kind_ = MetricKind::Flat;
  double r_min_ = 1.0;
  double tau_ = 1.0;
  double holder_alpha_ = 0.5;
  double fd_step_ = 0.0;
  std::optional<double> mass_;
  std::vector<double> coeffs_;
  RadialProfile profile_;
  Box box_{};
  std::function<Mat3(const Vec3&)> gamma_;
};

struct PointGeometry {
  Vec3 position;
  Mat3 g;
  Mat3 g_inv;
  double sqrt_det_g = 1.0;
  double scalar_curvature = 0.0;
  Mat3 ricci;                       // covariant Ric_ij
  std::array<Mat3, 3> christoffel;  // christoffel[k](i, j) = Gamma^k_ij

  /// Ric(v, v) for coordinate components v^i.
  double ricci_form(const Vec3& v) const { return v.dot(ricci * v); }
};

PointGeometry metric_at(const MetricSpec& spec, const Vec3& x);

/// Metric components only (no curvature work).
Mat3 metric_components(const MetricSpec& spec, const Vec3& x);

/// d[k](i, j) = partial_k g_ij.
std::array<Mat3, 3> metric_derivatives(const MetricSpec& spec, const Vec3& x);

double scalar_curvature(const MetricSpec& spec, const Vec3& x);

struct DecaySample {
  double radius;
  double metric_decay;      // sup |x|^tau |gamma_ij|
  double derivative_decay;  // sup |x|^{1+tau} |d gamma_ij|
};

struct DecayReport {
  double tau;
  std::vector<DecaySample> samples;
  bool growing = false;
  bool passed() const { return !growing; }
};

DecayReport check_asymptotic_flatness(const MetricSpec& spec, std::span<const double> radii);

double horizon_area(const MetricSpec& spec);

/// g-area of the coordinate sphere |x| = r by product quadrature.
double coordinate_sphere_area(const MetricSpec& spec, double r, int n_theta = 24);

/// Re-express a radial spec through the sampled-grid code path.
MetricSpec as_sampled_grid(const MetricSpec& radial, Box box, double fd_step);

}  // namespace capflow
