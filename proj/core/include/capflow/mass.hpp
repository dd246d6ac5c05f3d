#pragma once

#include <optional>
#include <string>
#include <vector>

#include "capflow/geometry.hpp"

namespace capflow {

struct AdmEstimate {
  std::vector<double> radii;
  std::vector<double> values;  // surface integral on each coordinate sphere
  double mass = 0.0;           // extrapolated to 1/r = 0, or the last value
  double spread = 0.0;         // change when the smallest radius is dropped
  bool extrapolated = false;
  bool closed_form = false;
};

struct AdmOptions {
  bool extrapolate = true;
  /// Use the sphere quadrature even when a closed form exists.
  bool force_quadrature = false;
  int n_theta = 32;
};

/// (1/16 pi) * integral of (d_j g_ij - d_i g_jj) x^i/|x| over Euclidean spheres,
/// extrapolated in 1/r. Refuses metrics with declared decay rate tau <= 1/2.
AdmEstimate adm_mass(const MetricSpec& spec, const std::vector<double>& radii,
                     const AdmOptions& opts = {});

/// Surface integral on a single sphere.
double adm_surface_integral(const MetricSpec& spec, double r, const AdmOptions& opts = {});

struct PToOneLimit {
  std::vector<double> p;
  std::vector<double> capacity;
  std::optional<double> limit;  // extrapolated Cap_{p -> 1}
  double area = 0.0;            // |dM|
  double relative_gap = 0.0;    // |limit - area| / area
  std::vector<std::string> warnings;
};

/// Extrapolation of x -> ln f(1 + x) with the model a + b x ln x + c x through the
/// three smallest x; the x ln x term is what the closed-form flat capacity shows.
std::optional<double> extrapolate_to_p_one(const std::vector<double>& p,
                                           const std::vector<double>& values,
                                           std::vector<std::string>* warnings = nullptr);

PToOneLimit p_to_one_limit(const MetricSpec& spec, std::vector<double> p_sequence);

struct CapacityAreaBound {
  double lhs = 0.0;  // sqrt|dM| ((3-p)/2p)^{p/(3-p)} / C^{3(p-1)/2(3-p)}
  double rhs = 0.0;  // Cap_p^{1/(3-p)}
  bool holds = false;
};

/// Isoperimetric value of the Euclidean L^1 Sobolev constant, (36 pi)^{-1/3}.
double default_sobolev_constant();

CapacityAreaBound capacity_area_bound(double capacity, double area, double sobolev_constant,
                                      double p);

struct PenroseRow {
  double p = 0.0;
  double capacity = 0.0;
  double c_p = 0.0;
  double t_p = 0.0;
  double lhs = 0.0;  // ((p-1)/(3-p))^{(p-1)/(3-p)} (Cap_p/4pi)^{1/(3-p)}
  double F_start = 0.0;  // F_p(t_p)
  double F_late = 0.0;   // F_p at the last scanned t
  bool chain_ok = false;  // lhs <= 2 m and 4 pi t_p <= F(t_p) <= F(late) <= 8 pi m
  CapacityAreaBound sobolev;
};

struct PenroseOptions {
  std::vector<double> adm_radii{50.0, 100.0, 200.0};
  double chain_tolerance = 1e-6;
  double equality_tolerance = 0.02;
  double limit_tolerance = 0.01;
  double late_t_factor = 100.0;  // F_late is taken at this multiple of t_p
  double sobolev_constant = 0.0;  // <= 0 selects the default
};

struct PenroseReport {
  std::string metric_id;
  double area = 0.0;
  double mass = 0.0;
  double mass_spread = 0.0;
  bool scalar_curvature_ok = true;
  bool horizon_minimal = true;
  double min_scalar_curvature = 0.0;
  double horizon_mean_curvature = 0.0;
  std::vector<PenroseRow> rows;
  std::optional<double> capacity_limit;
  std::optional<double> lhs_limit;
  double penrose_lhs = 0.0;  // sqrt(|dM| / 16 pi)
  bool chain_ok = false;
  bool inequality_ok = false;
  bool equality = false;     // sqrt(|dM|/16 pi) = m within equality_tolerance
  std::vector<std::string> warnings;

  /// Single-line verdict, e.g. "PENROSE: PASS (equality within 2%)".
  std::string verdict_line() const;
  bool passed() const { return chain_ok && inequality_ok; }
};

PenroseReport penrose_chain(const MetricSpec& spec, const std::vector<double>& p_list,
                            const PenroseOptions& opts = {});

}  // namespace capflow
