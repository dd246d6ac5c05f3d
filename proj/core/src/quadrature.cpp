#include "capflow/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "capflow/error.hpp"

namespace capflow {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: n must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

SphereQuadrature::SphereQuadrature(int n_theta) {
  const GaussRule gl = gauss_legendre(n_theta);
  const int n_phi = 2 * n_theta;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double ph = (j + 0.5) * dphi;
      const double cp = std::cos(ph), sp = std::sin(ph);
      Node node;
      node.normal = Vec3(st * cp, st * sp, ct);
      node.e_theta = Vec3(ct * cp, ct * sp, -st);
      node.e_phi = Vec3(-sp, cp, 0.0);
      node.weight = gl.weights[i] * dphi;
      nodes.push_back(node);
    }
  }
}

double neville_at_zero(std::span<const double> h, std::span<const double> f) {
  const size_t n = h.size();
  if (n == 0 || f.size() != n) throw ParameterError("neville_at_zero: size mismatch");
  std::vector<double> p(f.begin(), f.end());
  for (size_t k = 1; k < n; ++k) {
    for (size_t i = 0; i + k < n; ++i) {
      p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i]);
    }
  }
  return p[0];
}

std::vector<double> least_squares(
    std::span<const double> x, std::span<const double> f,
    const std::vector<std::function<double(double)>>& basis) {
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  if (m < n || f.size() != x.size()) throw ParameterError("least_squares: underdetermined fit");
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = basis[j](x[i]);
    b(i) = f[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return {c.data(), c.data() + n};
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  const auto c = least_squares(x, y, {[](double) { return 1.0; }, [](double s) { return s; }});
  return c[1];
}

}  // namespace capflow
