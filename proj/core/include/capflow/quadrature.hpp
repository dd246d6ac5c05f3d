#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace capflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points (Golub-Welsch).
GaussRule gauss_legendre(int n);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta), uniform in phi.
struct SphereQuadrature {
  struct Node {
    Vec3 normal;       // unit radial direction
    Vec3 e_theta;      // orthonormal tangent frame
    Vec3 e_phi;
    double weight;     // Euclidean solid-angle weight, sums to 4 pi
  };
  std::vector<Node> nodes;

  explicit SphereQuadrature(int n_theta);
};

/// Polynomial extrapolation to h = 0 through the points (h_i, f_i).
double neville_at_zero(std::span<const double> h, std::span<const double> f);

/// Least-squares coefficients for f ~ sum_j c_j * basis_j(x).
std::vector<double> least_squares(
    std::span<const double> x, std::span<const double> f,
    const std::vector<std::function<double(double)>>& basis);

/// Slope of the least-squares line through (x_i, y_i).
double fitted_slope(std::span<const double> x, std::span<const double> y);

}  // namespace capflow
