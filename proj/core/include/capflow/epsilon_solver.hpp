#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "capflow/grid.hpp"
#include "capflow/radial.hpp"

namespace capflow {

enum class Symmetry { None, Octant };

struct GridConfig {
  double spacing = 1.0 / 16.0;
  double inner_radius = 1.0;
  double outer_radius = 4.0;
  /// Octant mode solves on x, y, z >= 0 with mirror conditions; the metric and
  /// boundary data must be symmetric under each coordinate reflection.
  Symmetry symmetry = Symmetry::Octant;
  double tol_picard = 1e-8;
  double tol_lin = 1e-10;
  int max_sweeps = 200;
  /// Nodes closer to the boundary than this fraction of h take the boundary value.
  double pin_fraction = 1e-2;
};

/// Dirichlet data on the outer sphere: constant T, or values of a trace.
struct OuterBoundary {
  double T = 0.5;
  std::function<double(const Vec3&)> values;

  static OuterBoundary constant(double T) { return {T, {}}; }
  static OuterBoundary trace(double T, std::function<double(const Vec3&)> values) {
    return {T, std::move(values)};
  }
  /// Oracle trace: the radial potential restricted to the outer sphere.
  static OuterBoundary oracle(const RadialPotential& pot, double outer_radius);
};

/// Lagged-diffusivity solve of div_g((|grad u|^2 + eps^2)^{(p-2)/2} grad u) = 0
/// on inner_radius <= |x| <= outer_radius, u = 0 inside, outer data outside.
GridField solve_regularized(const MetricSpec& spec, double p, double eps, const GridConfig& config,
                            const OuterBoundary& outer);

struct ResidualNorms {
  double max_abs = 0.0;   // max over domain nodes of the nodal divergence
  double rms = 0.0;
  double relative = 0.0;  // ||A(u) u - b(u)|| / ||b(u)|| over the full lattice
};

ResidualNorms residual(const GridField& field);

/// Nodal divergence with the solver stencil; zero off the domain.
std::vector<double> residual_field(const GridField& field);

struct CpEpsilon {
  double boundary = 0.0;  // from the discrete flux through the inner cut faces
  double level = 0.0;     // from a surface integral on an interior level
  double level_tau = 0.0;
  double relative_gap = 0.0;
};

/// c_{p,eps} with c^{p-1} = (1/4 pi) * flux of |grad u|_eps^{p-2} grad u.
CpEpsilon c_p_epsilon(const GridField& field, std::optional<double> level_tau = std::nullopt);

/// Boundary-flux value of c_{p,eps} alone (no level extraction).
double c_p_epsilon_boundary(const GridField& field);

/// Oracle values on an arbitrary lattice; nodes inside r_min get a quadratic
/// radial extension and are marked Ghost.
GridField sample_radial_field(const RadialPotential& pot, const Lattice& lattice, double eps = 0.0);

/// Binary field (header + values + states) and a key=value sidecar.
void write_field(const GridField& field, const std::filesystem::path& binary,
                 const std::filesystem::path& sidecar, const std::vector<std::string>& header_lines);
GridField read_field(const std::filesystem::path& binary, const MetricSpec& metric);

struct RadialAverage {
  double r;
  double mean;
  double min;
  double max;
  int count;
};

/// Node values binned by coordinate radius in shells of width h.
std::vector<RadialAverage> radial_averages(const GridField& field);

}  // namespace capflow
