#include "capflow/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "capflow/version.hpp"

namespace capflow {

const char* version_string() { return CAPFLOW_VERSION; }

std::vector<std::string> OutputMeta::header_lines() const {
  std::vector<std::string> lines{std::string("capflow ") + version_string(),
                                 "config_sha256 " + (config_hash.empty() ? "none" : config_hash)};
  lines.insert(lines.end(), extra.begin(), extra.end());
  return lines;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_header(std::ostream& os, const OutputMeta& meta) {
  for (const auto& line : meta.header_lines()) os << "# " << line << '\n';
}

namespace {

void row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_number(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_potential_csv(const RadialPotential& pot, std::ostream& os, const OutputMeta& meta,
                         int stride) {
  write_header(os, meta);
  os << "# p " << format_number(pot.p()) << " capacity " << format_number(pot.capacity())
     << " c_p " << format_number(pot.c_p()) << " t_p " << format_number(pot.t_p()) << '\n';
  // one_minus_u keeps full precision where u rounds to 1
  os << "r,u,du_dr,grad_norm_g,H_g,area_g,one_minus_u\n";
  const auto r = pot.radii();
  const auto u = pot.values();
  const auto w = pot.one_minus_values();
  const auto du = pot.derivatives();
  stride = std::max(stride, 1);
  for (size_t i = 0; i < r.size(); i += stride) {
    const RadialGeometry g = radial_geometry_at(pot, r[i]);
    row(os, {r[i], u[i], du[i], g.grad_norm, g.mean_curvature, g.area, w[i]});
  }
}

void write_scan_csv(const MonotonicityReport& rep, std::ostream& os, const OutputMeta& meta) {
  write_header(os, meta);
  const auto& v = rep.verdict;
  os << "# p " << format_number(rep.p) << " eps " << format_number(rep.eps) << " c "
     << format_number(rep.c) << " t_p " << format_number(rep.t_p) << '\n';
  os << "# min_increment " << format_number(v.min_increment) << " tolerance "
     << format_number(v.tolerance) << " monotone " << (v.monotone ? 1 : 0) << " boundary_value "
     << format_number(v.boundary_value) << " tail_estimate " << format_number(v.tail_estimate)
     << '\n';
  os << "t,alpha,area,flux,willmore,F,M,Q,regular\n";
  for (const auto& r : rep.rows) {
    os << format_number(r.t) << ',' << format_number(r.alpha) << ',' << format_number(r.area) << ','
       << format_number(r.flux) << ',' << format_number(r.willmore) << ',' << format_number(r.F)
       << ',' << format_number(r.M) << ',' << format_number(r.Q) << ',' << (r.regular ? 1 : 0)
       << '\n';
  }
}

void write_scan_svg(const MonotonicityReport& rep, std::optional<double> reference,
                    std::ostream& os, const OutputMeta& meta) {
  constexpr double W = 640, Hgt = 400, L = 70, R = 20, T = 30, B = 50;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  for (const auto& line : meta.header_lines()) os << "<!-- " << line << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt
     << "\" viewBox=\"0 0 " << W << ' ' << Hgt << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (rep.rows.empty()) {
    os << "</svg>\n";
    return;
  }
  double t0 = rep.rows.front().t, t1 = rep.rows.back().t;
  if (!(t1 > t0)) t1 = t0 * 2.0;
  double lo = 0.0, hi = 0.0;
  for (const auto& r : rep.rows) {
    lo = std::min({lo, r.F, r.M, r.Q});
    hi = std::max({hi, r.F, r.M, r.Q});
  }
  if (reference) {
    lo = std::min(lo, *reference);
    hi = std::max(hi, *reference);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto X = [&](double t) { return L + (W - L - R) * std::log(t / t0) / std::log(t1 / t0); };
  auto Y = [&](double v) { return T + (Hgt - T - B) * (hi - v) / (hi - lo); };
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << Hgt - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto curve = [&](auto get, const char* color, const char* name, int k) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rep.rows) os << format_number(X(r.t)) << ',' << format_number(Y(get(r))) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << L + 10 + 60 * k << "\" y=\"" << T - 10 << "\" fill=\"" << color
       << "\" font-size=\"12\">" << name << "</text>\n";
  };
  curve([](const FunctionalValue& r) { return r.F; }, "#1f77b4", "F_p", 0);
  curve([](const FunctionalValue& r) { return r.M; }, "#2ca02c", "M_p", 1);
  curve([](const FunctionalValue& r) { return r.Q; }, "#d62728", "Q_p", 2);
  if (reference) {
    os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << format_number(Y(*reference))
       << "\" y2=\"" << format_number(Y(*reference))
       << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << W - R - 110 << "\" y=\"" << format_number(Y(*reference) - 4)
       << "\" fill=\"gray\" font-size=\"12\">8 pi m_ADM</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << Hgt - 15 << "\" font-size=\"12\">t (log scale, "
     << format_number(t0) << " to " << format_number(t1) << ")</text>\n";
  os << "<text x=\"5\" y=\"" << T + 10 << "\" font-size=\"11\">" << format_number(hi) << "</text>\n";
  os << "<text x=\"5\" y=\"" << Hgt - B << "\" font-size=\"11\">" << format_number(lo) << "</text>\n";
  os << "</svg>\n";
}

void write_penrose_csv(const PenroseReport& rep, std::ostream& os, const OutputMeta& meta) {
  write_header(os, meta);
  os << "# metric " << rep.metric_id << '\n';
  os << "# area " << format_number(rep.area) << " m_adm " << format_number(rep.mass) << " spread "
     << format_number(rep.mass_spread) << '\n';
  os << "p,capacity,c_p,t_p,lhs,F_start,F_late,chain_ok,sobolev_lhs,sobolev_rhs,sobolev_ok\n";
  for (const auto& r : rep.rows) {
    os << format_number(r.p) << ',' << format_number(r.capacity) << ',' << format_number(r.c_p)
       << ',' << format_number(r.t_p) << ',' << format_number(r.lhs) << ','
       << format_number(r.F_start) << ',' << format_number(r.F_late) << ','
       << (r.chain_ok ? 1 : 0) << ',' << format_number(r.sobolev.lhs) << ','
       << format_number(r.sobolev.rhs) << ',' << (r.sobolev.holds ? 1 : 0) << '\n';
  }
}

void write_penrose_summary(const PenroseReport& rep, std::ostream& os, const OutputMeta& meta) {
  write_header(os, meta);
  auto mark = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  os << "metric: " << rep.metric_id << '\n';
  os << "horizon area |dM| = " << format_number(rep.area) << '\n';
  os << "m_ADM = " << format_number(rep.mass) << " +- " << format_number(rep.mass_spread) << '\n';
  os << "scalar curvature >= 0 (sampled min " << format_number(rep.min_scalar_curvature)
     << "): " << mark(rep.scalar_curvature_ok) << '\n';
  os << "horizon minimal (H = " << format_number(rep.horizon_mean_curvature)
     << "): " << mark(rep.horizon_minimal) << '\n';
  for (const auto& r : rep.rows) {
    os << "p = " << format_number(r.p) << ": LHS = " << format_number(r.lhs)
       << " <= 2 m = " << format_number(2.0 * rep.mass) << ": " << mark(r.chain_ok) << '\n';
  }
  if (rep.capacity_limit) {
    os << "Cap_p as p -> 1: " << format_number(*rep.capacity_limit) << " vs |dM| "
       << format_number(rep.area) << '\n';
  }
  if (rep.lhs_limit) os << "LHS as p -> 1: " << format_number(*rep.lhs_limit) << '\n';
  os << "sqrt(|dM|/16 pi) = " << format_number(rep.penrose_lhs) << " <= m_ADM: "
     << mark(rep.inequality_ok) << '\n';
  for (const auto& w : rep.warnings) os << "warning: " << w << '\n';
  os << rep.verdict_line() << '\n';
}

void write_adm_csv(const AdmEstimate& est, std::ostream& os, const OutputMeta& meta) {
  write_header(os, meta);
  os << "# method " << (est.closed_form ? "closed_form" : "sphere_quadrature") << '\n';
  os << "radius,estimate\n";
  for (size_t i = 0; i < est.radii.size(); ++i) row(os, {est.radii[i], est.values[i]});
  os << "# extrapolated " << (est.extrapolated ? 1 : 0) << " mass " << format_number(est.mass)
     << " spread " << format_number(est.spread) << '\n';
}

void write_identity_csv(const std::vector<PointIdentities>& rows, std::ostream& os,
                        const OutputMeta& meta) {
  write_header(os, meta);
  os << "x,y,z,grad_norm,divx_direct,divx_geometric,divx_rel,kato_lhs,kato_rhs,kato_rel,"
        "P,D,divy_direct,divy_rel,H,H_pde,H_rel\n";
  for (const auto& r : rows) {
    row(os, {r.x[0], r.x[1], r.x[2], r.grad_norm, r.div_x.first, r.div_x.second,
             r.div_x.relative(), r.kato.first, r.kato.second, r.kato.relative(), r.div_y.P,
             r.div_y.D, r.div_y.div_y, r.div_y.relative(), r.mean_curvature.first,
             r.mean_curvature.second, r.mean_curvature.relative()});
  }
}

}  // namespace capflow
