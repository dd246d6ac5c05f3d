#pragma once

#include <span>
#include <vector>

#include "capflow/grid.hpp"
#include "capflow/radial.hpp"

namespace capflow {

/// One identity checked at a point: two evaluations of the same quantity.
struct IdentityCheck {
  double first = 0.0;   // direct evaluation
  double second = 0.0;  // closed-form right-hand side
  double scale = 1.0;   // local magnitude used for normalization
  double absolute() const;
  double relative() const;
};

struct DivYSplit {
  double P = 0.0;
  double D = 0.0;
  double div_y = 0.0;  // direct divergence of Y
  double scale = 1.0;
  bool p_nonnegative = true;
  double relative() const;
};

/// Everything the identity suite evaluates at one point.
struct PointIdentities {
  Vec3 x;
  double grad_norm = 0.0;
  IdentityCheck div_x;    // div X: finite-difference divergence vs the geometric form
  IdentityCheck kato;     // both sides of the Kato-type identity, scale |hess u|^2
  IdentityCheck mean_curvature;  // geometric H vs -((p-1)|du|^2+eps^2)/(|du|^2+eps^2) <d|du|,du>/|du|^2
  DivYSplit div_y;
};

/// Floor on |grad u|_g below which a point counts as critical.
constexpr double kCriticalFloor = 1e-8;

/// Closed-form radial jets, divergence by Richardson-extrapolated differences.
PointIdentities identities_at(const RadialPotential& pot, const Vec3& x);

/// Grid jets at node (i, j, k), divergence by centered differences of node values.
/// c is the normalization constant used in X (c_p or c_{p,eps}).
PointIdentities identities_at(const GridField& field, int i, int j, int k, double c);

IdentityCheck divX_residual(const RadialPotential& pot, const Vec3& x);
IdentityCheck kato_residual(const RadialPotential& pot, const Vec3& x);
DivYSplit div_y_split(const RadialPotential& pot, const Vec3& x);

/// Oracle values sampled on a 7^3 lattice of spacing h centred at x, then the
/// grid path at the centre node.
PointIdentities sampled_identities(const RadialPotential& pot, const Vec3& x, double h);

struct RefinementStudy {
  double h_coarse = 0.0;
  double h_fine = 0.0;
  double div_x_coarse = 0.0, div_x_fine = 0.0, div_x_order = 0.0;
  double kato_coarse = 0.0, kato_fine = 0.0, kato_order = 0.0;
  double div_y_coarse = 0.0, div_y_fine = 0.0, div_y_order = 0.0;
  double max_abs_D_coarse = 0.0, max_abs_D_fine = 0.0;
  bool p_nonnegative = true;
};

/// Root-mean-square relative residuals at h and h/2 over the given points.
RefinementStudy identity_refinement(const RadialPotential& pot, std::span<const Vec3> points,
                                    double h);

/// n points with radii log-uniform in [r_lo, r_hi] and uniform directions.
std::vector<Vec3> random_points(unsigned seed, int n, double r_lo, double r_hi);

}  // namespace capflow
