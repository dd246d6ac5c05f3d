#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "capflow/geometry.hpp"

namespace capflow {

/// Uniform Cartesian node lattice: x = origin + h * (i, j, k).
struct Lattice {
  Vec3 origin = Vec3::Zero();
  double h = 1.0;
  std::array<int, 3> n{1, 1, 1};

  size_t size() const { return size_t(n[0]) * n[1] * n[2]; }
  size_t index(int i, int j, int k) const { return (size_t(k) * n[1] + j) * n[0] + i; }
  bool valid(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < n[0] && j < n[1] && k < n[2];
  }
  Vec3 position(int i, int j, int k) const { return origin + h * Vec3(i, j, k); }
  std::array<int, 3> coords(size_t idx) const {
    const int i = int(idx % n[0]);
    const int j = int((idx / n[0]) % n[1]);
    const int k = int(idx / (size_t(n[0]) * n[1]));
    return {i, j, k};
  }
  /// Centered cube [-half_width, half_width]^3 with spacing h.
  static Lattice centered(double half_width, double h);
};

/// Ghost nodes lie just outside the domain and hold extrapolated values;
/// Hole and Outside nodes hold the plain boundary data.
enum class NodeState : std::uint8_t { Interior, Pinned, Ghost, Hole, Outside };

/// Value and coordinate derivatives of a scalar at one point.
struct PointJet {
  double u = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

struct SolverLog {
  std::vector<double> residual_history;  // relative nonlinear residual per sweep
  std::vector<double> update_history;    // max |u_{k+1} - u_k| per sweep
  int sweeps = 0;
  long linear_iterations = 0;
  bool converged = false;
};

/// Nodal field on a lattice plus everything needed to interpret it.
///
/// Solver output lives on the annulus r_in <= |x| <= r_out; nodes outside carry
/// extrapolated ghost values so centered differences stay meaningful near the
/// boundary. Oracle-sampled fields set r_in = r_min and r_out = +inf.
struct GridField {
  Lattice lattice;
  std::vector<double> u;
  std::vector<NodeState> state;
  MetricSpec metric = MetricSpec::flat(1.0);
  double p = 2.0;
  double eps = 0.0;
  double T = 1.0;
  double r_in = 1.0;
  double r_out = 2.0;
  bool outer_trace = false;
  std::function<double(const Vec3&)> outer_values;  // empty for constant T
  double tol_picard = 1e-8;
  double tol_lin = 1e-10;
  double pin_fraction = 1e-2;
  bool octant = false;  // solved on one octant and mirrored
  SolverLog log;

  double at(int i, int j, int k) const { return u[lattice.index(i, j, k)]; }
  bool in_domain(int i, int j, int k) const {
    const auto s = state[lattice.index(i, j, k)];
    return s == NodeState::Interior || s == NodeState::Pinned;
  }
  bool usable(int i, int j, int k) const {
    return lattice.valid(i, j, k) && state[lattice.index(i, j, k)] <= NodeState::Ghost;
  }
  double outer_value(const Vec3& x) const { return outer_values ? outer_values(x) : T; }
};

/// Centered second-order jet at a node; needs the 26-neighborhood on the lattice.
PointJet node_jet(const GridField& field, int i, int j, int k);

/// True when node_jet can be evaluated at (i, j, k).
bool has_jet(const GridField& field, int i, int j, int k);

/// Trilinear interpolation of node jets; throws DomainError if a corner lacks a jet.
PointJet interpolate_jet(const GridField& field, const Vec3& x);

/// Trilinear interpolation of the nodal values.
double interpolate_value(const GridField& field, const Vec3& x);

}  // namespace capflow
