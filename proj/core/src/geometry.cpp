#include "capflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "capflow/error.hpp"

namespace capflow {

namespace {

constexpr double kDomainSlack = 1e-12;

RadialProfile polynomial_profile(const std::vector<double>& c) {
  RadialProfile prof;
  prof.phi = [c](double r) {
    double s = 0.0, q = 1.0;
    for (double ck : c) { s += ck * q; q /= r; }
    return s;
  };
  prof.dphi = [c](double r) {
    double s = 0.0;
    for (size_t k = 1; k < c.size(); ++k) s -= k * c[k] * std::pow(r, -double(k) - 1.0);
    return s;
  };
  prof.d2phi = [c](double r) {
    double s = 0.0;
    for (size_t k = 1; k < c.size(); ++k) s += k * (k + 1.0) * c[k] * std::pow(r, -double(k) - 2.0);
    return s;
  };
  return prof;
}

Mat3 grid_metric(const MetricSpec& spec, const Vec3& x) {
  Mat3 g = Mat3::Identity() + spec.gamma()(x);
  return 0.5 * (g + g.transpose());
}

// Closed form for g = e^{2w} delta with w = 2 ln phi(r).
PointGeometry conformal_point(const RadialProfile& prof, const Vec3& x) {
  const double r = x.norm();
  const Vec3 n = x / r;
  const double phi = prof.phi(r), dphi = prof.dphi(r), d2phi = prof.d2phi(r);
  if (!(phi > 0.0)) throw DomainError("conformal factor is not positive");
  const double phi4 = std::pow(phi, 4);
  const double w1 = 2.0 * dphi / phi;
  const double w2 = 2.0 * (d2phi / phi - (dphi / phi) * (dphi / phi));
  const Vec3 dw = w1 * n;
  const Mat3 nn = n * n.transpose();
  const Mat3 ddw = w2 * nn + (w1 / r) * (Mat3::Identity() - nn);
  const double lap_w = w2 + 2.0 * w1 / r;

  PointGeometry pg;
  pg.position = x;
  pg.g = phi4 * Mat3::Identity();
  pg.g_inv = Mat3::Identity() / phi4;
  pg.sqrt_det_g = phi4 * phi * phi;
  pg.ricci = -(ddw - dw * dw.transpose()) - (lap_w + dw.squaredNorm()) * Mat3::Identity();
  const double lap_phi = d2phi + 2.0 * dphi / r;
  pg.scalar_curvature = -8.0 * lap_phi / std::pow(phi, 5);
  for (int k = 0; k < 3; ++k) {
    Mat3 gk = Mat3::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        gk(i, j) = (k == i ? dw(j) : 0.0) + (k == j ? dw(i) : 0.0) - (i == j ? dw(k) : 0.0);
      }
    }
    pg.christoffel[k] = gk;
  }
  return pg;
}

PointGeometry grid_point(const MetricSpec& spec, const Vec3& x) {
  const double h = spec.fd_step();
  auto at = [&](const Vec3& y) { return grid_metric(spec, y); };
  const Vec3 e[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};

  const Mat3 g0 = at(x);
  std::array<Mat3, 3> dg;
  std::array<std::array<Mat3, 3>, 3> ddg;
  std::array<Mat3, 3> gp, gm;
  for (int k = 0; k < 3; ++k) {
    gp[k] = at(x + h * e[k]);
    gm[k] = at(x - h * e[k]);
    dg[k] = (gp[k] - gm[k]) / (2.0 * h);
    ddg[k][k] = (gp[k] - 2.0 * g0 + gm[k]) / (h * h);
  }
  for (int k = 0; k < 3; ++k) {
    for (int l = k + 1; l < 3; ++l) {
      const Mat3 m = (at(x + h * e[k] + h * e[l]) - at(x + h * e[k] - h * e[l]) -
                      at(x - h * e[k] + h * e[l]) + at(x - h * e[k] - h * e[l])) /
                     (4.0 * h * h);
      ddg[k][l] = m;
      ddg[l][k] = m;
    }
  }

  PointGeometry pg;
  pg.position = x;
  pg.g = g0;
  const double det = g0.determinant();
  if (!(det > 0.0) || g0.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() <= 0.0) {
    throw DomainError("metric is not positive definite at sample point");
  }
  pg.g_inv = g0.inverse();
  pg.sqrt_det_g = std::sqrt(det);

  // Gamma_{l i j} and its derivatives.
  auto gamma_low = [&](int l, int i, int j) {
    return 0.5 * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
  };
  auto dgamma_low = [&](int m, int l, int i, int j) {
    return 0.5 * (ddg[m][i](l, j) + ddg[m][j](l, i) - ddg[m][l](i, j));
  };
  for (int k = 0; k < 3; ++k) {
    Mat3 gk = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) gk(i, j) += pg.g_inv(k, l) * gamma_low(l, i, j);
    pg.christoffel[k] = gk;
  }
  // dG[m][k](i, j) = partial_m Gamma^k_ij
  std::array<std::array<Mat3, 3>, 3> dG;
  for (int m = 0; m < 3; ++m) {
    const Mat3 dginv = -pg.g_inv * dg[m] * pg.g_inv;
    for (int k = 0; k < 3; ++k) {
      Mat3 v = Mat3::Zero();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int l = 0; l < 3; ++l)
            v(i, j) += dginv(k, l) * gamma_low(l, i, j) + pg.g_inv(k, l) * dgamma_low(m, l, i, j);
      dG[m][k] = v;
    }
  }
  const auto& G = pg.christoffel;
  Mat3 ric = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        s += dG[k][k](i, j) - dG[j][k](i, k);
        for (int l = 0; l < 3; ++l) {
          s += G[k](k, l) * G[l](i, j) - G[k](j, l) * G[l](i, k);
        }
      }
      ric(i, j) = s;
    }
  }
  pg.ricci = 0.5 * (ric + ric.transpose());
  pg.scalar_curvature = (pg.g_inv.cwiseProduct(pg.ricci)).sum();
  return pg;
}

}  // namespace

MetricSpec MetricSpec::flat(double r0) {
  if (!(r0 > 0.0)) throw ParameterError("flat: r0 must be positive");
  MetricSpec s;
  s.kind_ = MetricKind::Flat;
  s.r_min_ = r0;
  s.coeffs_ = {1.0};
  s.profile_ = polynomial_profile(s.coeffs_);
  return s;
}

MetricSpec MetricSpec::schwarzschild(double m) {
  if (!(m > 0.0)) throw ParameterError("schwarzschild: mass must be positive");
  MetricSpec s = conformal_polynomial({1.0, 0.5 * m}, 0.5 * m);
  s.mass_ = m;
  return s;
}

MetricSpec MetricSpec::conformal_polynomial(std::vector<double> coeffs, double r_min) {
  if (coeffs.empty() || std::abs(coeffs[0] - 1.0) > 1e-14) {
    throw ParameterError("conformal factor must tend to 1: leading coefficient must be 1");
  }
  MetricSpec s = conformal(polynomial_profile(coeffs), r_min);
  s.coeffs_ = std::move(coeffs);
  return s;
}

MetricSpec MetricSpec::conformal(RadialProfile profile, double r_min) {
  if (!(r_min > 0.0)) throw ParameterError("conformal: r_min must be positive");
  if (!profile.phi || !profile.dphi || !profile.d2phi) {
    throw ParameterError("conformal: profile needs phi, phi' and phi''");
  }
  MetricSpec s;
  s.kind_ = MetricKind::ConformallyFlatRadial;
  s.r_min_ = r_min;
  s.profile_ = std::move(profile);
  // Positivity on a geometric sweep of the exterior.
  for (double r = r_min; r < r_min * 1e6; r *= 1.05) {
    if (!(s.profile_.phi(r) > 0.0)) throw ParameterError("conformal factor must be positive");
  }
  return s;
}

MetricSpec MetricSpec::sampled_grid(std::function<Mat3(const Vec3&)> gamma, Box box,
                                    double horizon_radius, double tau, double holder_alpha,
                                    double fd_step) {
  if (!gamma) throw ParameterError("sampled_grid: gamma callable is empty");
  if (!(tau > 0.0)) throw ParameterError("sampled_grid: decay rate must be positive");
  if (!(holder_alpha > 0.0 && holder_alpha < 1.0)) {
    throw ParameterError("sampled_grid: Holder exponent must lie in (0,1)");
  }
  if (!(fd_step > 0.0)) throw ParameterError("sampled_grid: fd_step must be positive");
  if (!(horizon_radius > 0.0)) throw ParameterError("sampled_grid: horizon radius must be positive");
  MetricSpec s;
  s.kind_ = MetricKind::SampledGrid;
  s.gamma_ = std::move(gamma);
  s.box_ = box;
  s.r_min_ = horizon_radius;
  s.tau_ = tau;
  s.holder_alpha_ = holder_alpha;
  s.fd_step_ = fd_step;
  return s;
}

const RadialProfile& MetricSpec::profile() const {
  if (!is_radial()) throw DomainError("sampled-grid metric has no radial profile");
  return profile_;
}

const Box& MetricSpec::box() const {
  if (is_radial()) throw DomainError("radial metric has no declared box");
  return box_;
}

const std::function<Mat3(const Vec3&)>& MetricSpec::gamma() const {
  if (is_radial()) throw DomainError("radial metric has no sampled gamma");
  return gamma_;
}

std::string MetricSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case MetricKind::Flat: os << "flat r0=" << r_min_; break;
    case MetricKind::ConformallyFlatRadial:
      if (mass_) {
        os << "schwarzschild m=" << *mass_;
      } else {
        os << "conformal r_min=" << r_min_;
        if (!coeffs_.empty()) {
          os << " phi=";
          for (size_t k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
        }
      }
      break;
    case MetricKind::SampledGrid:
      os << "grid horizon=" << r_min_ << " tau=" << tau_ << " fd_step=" << fd_step_;
      break;
  }
  return os.str();
}

void MetricSpec::require_in_domain(const Vec3& x) const {
  if (is_radial()) {
    if (!(x.norm() >= r_min_ * (1.0 - kDomainSlack))) {
      throw DomainError("point lies inside the horizon sphere");
    }
  } else if (!box_.contains(x)) {
    throw DomainError("point lies outside the declared coordinate box");
  }
}

PointGeometry metric_at(const MetricSpec& spec, const Vec3& x) {
  spec.require_in_domain(x);
  if (spec.is_radial()) return conformal_point(spec.profile(), x);
  return grid_point(spec, x);
}

Mat3 metric_components(const MetricSpec& spec, const Vec3& x) {
  if (spec.is_flat()) return Mat3::Identity();
  if (spec.is_radial()) return std::pow(spec.profile().phi(x.norm()), 4) * Mat3::Identity();
  return grid_metric(spec, x);
}

std::array<Mat3, 3> metric_derivatives(const MetricSpec& spec, const Vec3& x) {
  std::array<Mat3, 3> d;
  if (spec.is_radial()) {
    const double r = x.norm();
    const auto& prof = spec.profile();
    const double f = 4.0 * std::pow(prof.phi(r), 3) * prof.dphi(r) / r;
    for (int k = 0; k < 3; ++k) d[k] = f * x(k) * Mat3::Identity();
    return d;
  }
  const double h = spec.fd_step();
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = h * Vec3::Unit(k);
    d[k] = (grid_metric(spec, x + e) - grid_metric(spec, x - e)) / (2.0 * h);
  }
  return d;
}

double scalar_curvature(const MetricSpec& spec, const Vec3& x) {
  spec.require_in_domain(x);
  if (spec.is_radial()) {
    const double r = x.norm();
    const auto& prof = spec.profile();
    const double lap = prof.d2phi(r) + 2.0 * prof.dphi(r) / r;
    return -8.0 * lap / std::pow(prof.phi(r), 5);
  }
  return grid_point(spec, x).scalar_curvature;
}

DecayReport check_asymptotic_flatness(const MetricSpec& spec, std::span<const double> radii) {
  for (size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw ParameterError("radii must be increasing");
  }
  DecayReport rep;
  rep.tau = spec.decay_rate();
  const SphereQuadrature quad(8);
  for (double r : radii) {
    DecaySample s{r, 0.0, 0.0};
    for (const auto& node : quad.nodes) {
      const Vec3 x = r * node.normal;
      spec.require_in_domain(x);
      const Mat3 gam = metric_components(spec, x) - Mat3::Identity();
      s.metric_decay = std::max(s.metric_decay, std::pow(r, rep.tau) * gam.cwiseAbs().maxCoeff());
      const auto d = metric_derivatives(spec, x);
      for (int k = 0; k < 3; ++k) {
        s.derivative_decay =
            std::max(s.derivative_decay, std::pow(r, 1.0 + rep.tau) * d[k].cwiseAbs().maxCoeff());
      }
    }
    rep.samples.push_back(s);
  }
  constexpr double kGrowthSlack = 1e-6;
  for (size_t i = 1; i < rep.samples.size(); ++i) {
    const auto& a = rep.samples[i - 1];
    const auto& b = rep.samples[i];
    if (b.metric_decay > a.metric_decay * (1.0 + kGrowthSlack) + 1e-300 ||
        b.derivative_decay > a.derivative_decay * (1.0 + kGrowthSlack) + 1e-300) {
      rep.growing = true;
    }
  }
  return rep;
}

double coordinate_sphere_area(const MetricSpec& spec, double r, int n_theta) {
  const SphereQuadrature quad(n_theta);
  double area = 0.0;
  for (const auto& node : quad.nodes) {
    const Mat3 g = metric_components(spec, r * node.normal);
    const double a = node.e_theta.dot(g * node.e_theta);
    const double b = node.e_phi.dot(g * node.e_phi);
    const double c = node.e_theta.dot(g * node.e_phi);
    area += node.weight * std::sqrt(a * b - c * c);
  }
  return area * r * r;
}

double horizon_area(const MetricSpec& spec) {
  const double r = spec.horizon_radius();
  if (spec.is_radial()) {
    return 4.0 * std::numbers::pi * r * r * std::pow(spec.profile().phi(r), 4);
  }
  return coordinate_sphere_area(spec, r);
}

MetricSpec as_sampled_grid(const MetricSpec& radial, Box box, double fd_step) {
  const RadialProfile prof = radial.profile();
  auto gamma = [prof](const Vec3& x) -> Mat3 {
    return (std::pow(prof.phi(x.norm()), 4) - 1.0) * Mat3::Identity();
  };
  return MetricSpec::sampled_grid(gamma, box, radial.horizon_radius(), radial.decay_rate(), 0.5,
                                  fd_step);
}

}  // namespace capflow
