#include "capflow/mass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "capflow/error.hpp"
#include "capflow/functional.hpp"
#include "capflow/levelset.hpp"
#include "capflow/radial.hpp"

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double adm_surface_integral(const MetricSpec& spec, double r, const AdmOptions& opts) {
  if (!(r > 0.0)) throw DomainError("ADM sphere radius must be positive");
  if (spec.is_radial() && !opts.force_quadrature) {
    // g = phi^4 delta: the integrand is -8 phi^3 phi' on the whole sphere.
    const auto& prof = spec.profile();
    const double phi = prof.phi(r);
    return -2.0 * r * r * phi * phi * phi * prof.dphi(r);
  }
  const SphereQuadrature quad(opts.n_theta);
  double sum = 0.0;
  for (const auto& node : quad.nodes) {
    const Vec3 x = r * node.normal;
    spec.require_in_domain(x);
    const auto d = metric_derivatives(spec, x);
    double integrand = 0.0;
    for (int i = 0; i < 3; ++i) {
      double div = 0.0, tr = 0.0;
      for (int j = 0; j < 3; ++j) {
        div += d[j](i, j);
        tr += d[i](j, j);
      }
      integrand += (div - tr) * node.normal[i];
    }
    sum += node.weight * integrand;
  }
  return sum * r * r / (16.0 * kPi);
}

AdmEstimate adm_mass(const MetricSpec& spec, const std::vector<double>& radii,
                     const AdmOptions& opts) {
  if (!(spec.decay_rate() > 0.5)) {
    throw ParameterError("ADM mass is not well defined for decay rate tau <= 1/2");
  }
  if (radii.empty()) throw ParameterError("adm_mass needs at least one radius");
  for (size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw ParameterError("ADM radii must be increasing");
  }
  AdmEstimate est;
  est.radii = radii;
  est.closed_form = spec.is_radial() && !opts.force_quadrature;
  for (double r : radii) est.values.push_back(adm_surface_integral(spec, r, opts));
  est.mass = est.values.back();
  if (opts.extrapolate && radii.size() >= 2) {
    std::vector<double> h;
    for (double r : radii) h.push_back(1.0 / r);
    est.mass = neville_at_zero(h, est.values);
    est.extrapolated = true;
    const std::span<const double> hs(h), vs(est.values);
    const double reduced = radii.size() >= 3 ? neville_at_zero(hs.subspan(1), vs.subspan(1))
                                             : est.values.back();
    est.spread = std::abs(est.mass - reduced);
  }
  return est;
}

std::optional<double> extrapolate_to_p_one(const std::vector<double>& p,
                                           const std::vector<double>& values,
                                           std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  if (p.size() != values.size()) throw ParameterError("p and value lists differ in length");
  if (p.size() < 2) {
    warn("single p value: no extrapolation to p = 1");
    return std::nullopt;
  }
  std::vector<size_t> order(p.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return p[a] < p[b]; });
  for (size_t i : order) {
    if (!(p[i] > 1.0) || !(values[i] > 0.0)) throw ParameterError("extrapolation needs p > 1 and positive values");
  }
  auto fit = [&](size_t first, size_t count) {
    std::vector<double> x, y;
    for (size_t k = first; k < first + count; ++k) {
      x.push_back(p[order[k]] - 1.0);
      y.push_back(std::log(values[order[k]]));
    }
    std::vector<std::function<double(double)>> basis{[](double) { return 1.0; },
                                                     [](double s) { return s * std::log(s); },
                                                     [](double s) { return s; }};
    if (count < 3) basis.pop_back();
    return std::exp(least_squares(x, y, basis)[0]);
  };
  const size_t n = std::min<size_t>(3, p.size());
  const double limit = fit(0, n);
  if (p.size() >= 4) {
    const double alt = fit(1, 3);
    if (std::abs(alt - limit) > 0.02 * limit) {
      std::ostringstream os;
      os << "p -> 1 fit is unstable: shifting the window moves the limit by "
         << 100.0 * std::abs(alt - limit) / limit << "%";
      warn(os.str());
    }
  }
  if (p[order[0]] > 1.2) warn("smallest p is far from 1; the extrapolation is coarse");
  return limit;
}

PToOneLimit p_to_one_limit(const MetricSpec& spec, std::vector<double> p_sequence) {
  PToOneLimit out;
  std::sort(p_sequence.begin(), p_sequence.end());
  out.p = p_sequence;
  out.area = horizon_area(spec);
  for (double p : p_sequence) out.capacity.push_back(solve_radial(spec, p).capacity());
  out.limit = extrapolate_to_p_one(out.p, out.capacity, &out.warnings);
  if (out.limit) out.relative_gap = std::abs(*out.limit - out.area) / out.area;
  return out;
}

double default_sobolev_constant() { return std::pow(36.0 * kPi, -1.0 / 3.0); }

CapacityAreaBound capacity_area_bound(double capacity, double area, double sobolev_constant,
                                      double p) {
  if (!(sobolev_constant > 0.0)) throw ParameterError("Sobolev constant must be positive");
  if (!(p > 1.0 && p < 3.0)) throw ParameterError("exponent p must lie in (1,3)");
  CapacityAreaBound b;
  const double e = 3.0 - p;
  b.lhs = std::sqrt(area) * std::pow(e / (2.0 * p), p / e) /
          std::pow(sobolev_constant, 3.0 * (p - 1.0) / (2.0 * e));
  b.rhs = std::pow(capacity, 1.0 / e);
  b.holds = b.lhs <= b.rhs;
  return b;
}

std::string PenroseReport::verdict_line() const {
  if (!passed()) return "PENROSE: FAIL";
  if (equality) return "PENROSE: PASS (equality within 2%)";
  return "PENROSE: PASS (strict inequality)";
}

PenroseReport penrose_chain(const MetricSpec& spec, const std::vector<double>& p_list,
                            const PenroseOptions& opts) {
  if (!spec.is_radial()) throw ParameterError("penrose_chain needs a rotationally symmetric metric");
  if (p_list.empty()) throw ParameterError("penrose_chain needs at least one p");
  PenroseReport rep;
  rep.metric_id = spec.describe();
  rep.area = horizon_area(spec);

  // Hypotheses: R >= 0 sampled on log-spaced radii, minimal horizon.
  const double r0 = spec.horizon_radius();
  rep.min_scalar_curvature = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) {
    const double r = r0 * std::pow(1e3, i / 200.0);
    rep.min_scalar_curvature =
        std::min(rep.min_scalar_curvature, scalar_curvature(spec, Vec3(r, 0.0, 0.0)));
  }
  rep.scalar_curvature_ok = rep.min_scalar_curvature >= -1e-10 / (r0 * r0);
  if (!rep.scalar_curvature_ok) rep.warnings.push_back("scalar curvature is negative somewhere");

  const AdmEstimate adm = adm_mass(spec, opts.adm_radii);
  rep.mass = adm.mass;
  rep.mass_spread = adm.spread;
  const double two_m = 2.0 * rep.mass;
  const double tol = opts.chain_tolerance;
  const double C = opts.sobolev_constant > 0.0 ? opts.sobolev_constant : default_sobolev_constant();

  std::vector<double> ps = p_list;
  std::sort(ps.begin(), ps.end());
  std::vector<double> caps, lhss;
  rep.chain_ok = true;
  bool first = true;
  for (double p : ps) {
    const RadialPotential pot = solve_radial(spec, p);
    if (first) {
      const LevelSurface horizon = extract_level(pot, 0.0);
      rep.horizon_mean_curvature = horizon.samples.front().mean_curvature;
      rep.horizon_minimal = std::abs(rep.horizon_mean_curvature) * r0 <= 1e-8;
      if (!rep.horizon_minimal) rep.warnings.push_back("horizon is not minimal");
      first = false;
    }
    PenroseRow row;
    row.p = p;
    row.capacity = pot.capacity();
    row.c_p = pot.c_p();
    row.t_p = pot.t_p();
    const double e = (p - 1.0) / (3.0 - p);
    row.lhs = std::exp(e * std::log(e) + std::log(row.capacity / (4.0 * kPi)) / (3.0 - p));
    row.F_start = compute_F(pot, row.t_p).F;
    row.F_late = compute_F(pot, opts.late_t_factor * row.t_p).F;
    const double scale = 8.0 * kPi * rep.mass;
    row.chain_ok = row.lhs <= two_m * (1.0 + tol) &&
                   4.0 * kPi * row.t_p <= row.F_start + tol * scale &&
                   row.F_start <= row.F_late + tol * scale && row.F_late <= scale * (1.0 + tol);
    row.sobolev = capacity_area_bound(row.capacity, rep.area, C, p);
    rep.chain_ok = rep.chain_ok && row.chain_ok;
    caps.push_back(row.capacity);
    lhss.push_back(row.lhs);
    rep.rows.push_back(row);
  }
  rep.capacity_limit = extrapolate_to_p_one(ps, caps, &rep.warnings);
  rep.lhs_limit = extrapolate_to_p_one(ps, lhss, nullptr);
  if (rep.lhs_limit && *rep.lhs_limit > two_m * (1.0 + opts.limit_tolerance)) rep.chain_ok = false;

  rep.penrose_lhs = std::sqrt(rep.area / (16.0 * kPi));
  rep.inequality_ok = rep.penrose_lhs <= rep.mass * (1.0 + 1e-4) + rep.mass_spread;
  rep.equality = std::abs(rep.penrose_lhs - rep.mass) <= opts.equality_tolerance * rep.mass;
  if (!rep.scalar_curvature_ok || !rep.horizon_minimal) {
    rep.warnings.push_back("hypotheses not met (R >= 0, minimal horizon): chain values carry no inequality guarantee");
  }
  return rep;
}

}  // namespace capflow
