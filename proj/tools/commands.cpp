#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "capflow/error.hpp"
#include "capflow/functional.hpp"
#include "capflow/identities.hpp"
#include "capflow/levelset.hpp"
#include "capflow/mass.hpp"
#include "capflow/report.hpp"

namespace capflow::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Named pass/fail lines; any failure turns into exit code 2.
class Verdicts {
 public:
  explicit Verdicts(std::ostream& log) : log_(log) {}
  void check(const std::string& name, bool ok, const std::string& detail) {
    log_ << "CHECK " << name << ": " << (ok ? "PASS" : "FAIL") << " (" << detail << ")\n";
    failed_ = failed_ || !ok;
  }
  int exit_code() const { return failed_ ? kExitVerdict : kExitOk; }

 private:
  std::ostream& log_;
  bool failed_ = false;
};

std::string num(double v) { return format_number(v); }

std::string p_tag(double p) {
  std::ostringstream os;
  os << "p" << p;
  return os.str();
}

fs::path output_dir(const RunConfig& cfg, const Options& opt) {
  fs::path dir = !opt.out_dir.empty() ? opt.out_dir
                                      : fs::path(cfg.get_string("output", "directory", "capflow_out"));
  fs::create_directories(dir);
  return dir;
}

OutputMeta meta_for(const RunConfig& cfg, const std::string& command) {
  OutputMeta m;
  m.config_hash = sha256_hex(cfg.text());
  m.extra.push_back("command " + command);
  return m;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

std::vector<double> t_grid_for(const RunConfig& cfg, double t_p, double t_cap, std::ostream& log) {
  double t_min = cfg.get_double("scan", "t_min", t_p);
  double t_max = cfg.get_double("scan", "t_max");
  const int count = cfg.get_int("scan", "count", 40);
  const std::string spacing = cfg.get_string("scan", "spacing", "log");
  if (spacing != "log" && spacing != "linear") throw ValidationError("scan.spacing must be log or linear");
  if (t_min < t_p) {
    // Rounding-level gaps are not worth a warning.
    if (t_p - t_min > 1e-12 * t_p) log << "warning: scan.t_min = " << num(t_min) << " is below t_p = " << num(t_p)
        << "; clamped to t_p\n";
    t_min = t_p;
  }
  if (t_max > t_cap) {
    log << "warning: scan.t_max = " << num(t_max) << " exceeds the solved range; clamped to "
        << num(t_cap) << "\n";
    t_max = t_cap;
  }
  if (!(t_max > t_min)) throw ValidationError("scan range is empty after clamping to [t_p, t_max]");
  return make_t_grid(t_min, t_max, count, spacing == "log");
}

double fraction_t(const Reparametrization& rep, double t_hi, double fraction) {
  return rep.t_p() * std::pow(t_hi / rep.t_p(), fraction);
}

void decay_checks(const RunConfig& cfg, const RadialPotential& pot, Verdicts& v, std::ostream& log) {
  if (!cfg.has("checks", "decay_tolerance")) return;
  const DecayFit fit = fit_decay(pot);
  const double tol = cfg.get_double("checks", "decay_tolerance");
  v.check("decay_exponent_" + p_tag(pot.p()), fit.relative_error <= tol,
          "fitted " + num(fit.exponent) + " expected " + num(fit.expected) + " rel " +
              num(fit.relative_error) + " <= " + num(tol));
  log << "info: empirical correction rate beta = " << num(fit.beta)
      << (fit.beta > 0.5 ? " (beta > 1/2 observed)" : " (beta > 1/2 not observed)") << "\n";
}

}  // namespace

int cmd_solve_radial(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const MetricSpec spec = cfg.metric();
  const fs::path dir = output_dir(cfg, opt);
  const OutputMeta meta = meta_for(cfg, "solve-radial");
  Verdicts v(log);
  const int stride = cfg.get_int("output", "stride", 1);
  for (double p : cfg.p_values()) {
    const RadialPotential pot = solve_radial(spec, p);
    log << "p = " << num(p) << ": Cap_p = " << num(pot.capacity()) << ", c_p = " << num(pot.c_p())
        << ", t_p = " << num(pot.t_p()) << ", tail fraction " << num(pot.tail_fraction()) << "\n";
    if (cfg.get_bool("output", "emit_csv", true)) {
      auto os = open_out(dir / ("potential_" + p_tag(p) + ".csv"));
      write_potential_csv(pot, os, meta, stride);
    }
    decay_checks(cfg, pot, v, log);
  }
  return v.exit_code();
}

int cmd_solve_grid(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const MetricSpec spec = cfg.metric();
  const fs::path dir = output_dir(cfg, opt);
  const OutputMeta meta = meta_for(cfg, "solve-grid");
  const GridConfig grid = cfg.grid();
  const std::vector<double> eps_list = cfg.get_list("solver", "eps_list", {cfg.get_double("solver", "eps")});
  const std::string outer = cfg.get_string("solver", "outer", "oracle");
  Verdicts v(log);
  for (double p : cfg.p_values()) {
    const RadialPotential pot = solve_radial(spec, p);
    OuterBoundary bc = OuterBoundary::oracle(pot, grid.outer_radius);
    if (outer == "constant") {
      bc = OuterBoundary::constant(cfg.get_double("solver", "T"));
    } else if (outer != "oracle") {
      throw ValidationError("solver.outer must be oracle or constant");
    }
    for (double eps : eps_list) {
      if (!(eps > 0.0)) throw ValidationError("solver.eps must be positive");
      const GridField f = solve_regularized(spec, p, eps, grid, bc);
      const std::string tag = p_tag(p) + "_eps" + num(eps);
      log << tag << ": " << f.log.sweeps << " Picard sweeps, " << f.log.linear_iterations
          << " CG iterations, final residual " << num(f.log.residual_history.back()) << "\n";
      write_field(f, dir / ("field_" + tag + ".bin"), dir / ("field_" + tag + ".meta"),
                  meta.header_lines());
      if (cfg.get_bool("output", "emit_csv", true)) {
        auto os = open_out(dir / ("field_" + tag + "_radial.csv"));
        write_header(os, meta);
        os << "r,mean,min,max,count,oracle\n";
        for (const auto& b : radial_averages(f)) {
          const double ref = b.r >= pot.r_min() ? pot.u(b.r) : 0.0;
          os << num(b.r) << ',' << num(b.mean) << ',' << num(b.min) << ',' << num(b.max) << ','
             << b.count << ',' << num(ref) << '\n';
        }
      }

      double max_err = 0.0;
      const Lattice& L = f.lattice;
      for (int k = 0; k < L.n[2]; ++k)
        for (int j = 0; j < L.n[1]; ++j)
          for (int i = 0; i < L.n[0]; ++i) {
            if (!f.in_domain(i, j, k)) continue;
            const double r = L.position(i, j, k).norm();
            max_err = std::max(max_err, std::abs(f.at(i, j, k) - pot.u(r)));
          }
      log << tag << ": max |u_grid - u_oracle| = " << num(max_err) << "\n";
      if (auto tol = cfg.find_double("checks", "max_oracle_error")) {
        v.check("oracle_error_" + tag, max_err <= *tol, num(max_err) + " <= " + num(*tol));
      }

      const double c_eps = c_p_epsilon_boundary(f);
      const double c_gap = std::abs(c_eps - pot.c_p()) / pot.c_p();
      log << tag << ": c_{p,eps} = " << num(c_eps) << " vs c_p = " << num(pot.c_p()) << "\n";
      if (auto tol = cfg.find_double("checks", "c_eps_tolerance")) {
        v.check("c_eps_" + tag, c_gap <= *tol, "rel gap " + num(c_gap) + " <= " + num(*tol));
      }

      const Reparametrization rep(p, c_eps);
      const double t_hi = rep.t_max(f.T);
      if (cfg.has("checks", "F_tolerance")) {
        const double tol = cfg.get_double("checks", "F_tolerance");
        for (double fr : cfg.get_list("checks", "F_fractions", {0.2, 0.5, 0.8})) {
          const double t = fraction_t(rep, t_hi, fr);
          const FunctionalValue fe = compute_F_epsilon(f, t, c_eps);
          const FunctionalValue fo = compute_F(pot, t);
          const double rel = std::abs(fe.F - fo.F) / std::max(std::abs(fo.F), 4.0 * kPi * t);
          v.check("F_eps_" + tag + "_t" + num(t), fe.regular && rel <= tol,
                  "F_eps " + num(fe.F) + " oracle " + num(fo.F) + " rel " + num(rel) + " <= " + num(tol));
        }
      }
      if (cfg.has("checks", "defect_s")) {
        const auto s_fr = cfg.get_list("checks", "defect_s");
        const auto t_fr = cfg.get_list("checks", "defect_t");
        if (s_fr.size() != t_fr.size()) throw ValidationError("checks.defect_s and checks.defect_t differ in length");
        for (size_t i = 0; i < s_fr.size(); ++i) {
          const DefectResult d = approx_monotonicity_defect(f, fraction_t(rep, t_hi, s_fr[i]),
                                                            fraction_t(rep, t_hi, t_fr[i]));
          v.check("defect_" + tag + "_" + std::to_string(i), d.holds && d.kernel_max <= 1.0 / 6.0,
                  "lhs " + num(d.lhs) + " >= rhs " + num(d.rhs) + ", kernel max " + num(d.kernel_max));
        }
      }
      if (cfg.get_bool("output", "emit_mesh", false)) {
        const LevelSurface surf = extract_level(f, 0.5 * f.T, ExtractOptions{false});
        auto os = open_out(dir / ("level_" + tag + ".mesh"));
        write_header(os, meta);
        write_mesh(surf, os);
      }
    }
  }
  return v.exit_code();
}

int cmd_scan(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const MetricSpec spec = cfg.metric();
  const fs::path dir = output_dir(cfg, opt);
  const OutputMeta meta = meta_for(cfg, "scan");
  const std::string source = cfg.get_string("scan", "source", "radial");
  Verdicts v(log);
  std::optional<double> reference;
  if (spec.is_radial()) reference = 8.0 * kPi * adm_mass(spec, {50.0, 100.0, 200.0}).mass;

  for (double p : cfg.p_values()) {
    const RadialPotential pot = solve_radial(spec, p);
    MonotonicityReport rep;
    if (source == "radial") {
      const double t_cap = pot.t_p() * 1e6;
      rep = monotonicity_scan(pot, t_grid_for(cfg, pot.t_p(), t_cap, log),
                              cfg.get_double("scan", "tol_mono", kTolMonoOracle));
    } else if (source == "grid") {
      const GridConfig grid = cfg.grid();
      const GridField f = solve_regularized(spec, p, cfg.get_double("solver", "eps"), grid,
                                            OuterBoundary::oracle(pot, grid.outer_radius));
      const Reparametrization r(p, c_p_epsilon_boundary(f));
      const double t_cap = r.t_p() + 0.98 * (r.t_max(f.T) - r.t_p());
      rep = monotonicity_scan(f, t_grid_for(cfg, r.t_p(), t_cap, log),
                              cfg.get_double("scan", "tol_mono", kTolMonoGrid));
    } else {
      throw ValidationError("scan.source must be radial or grid");
    }
    const std::string tag = p_tag(p);
    if (cfg.get_bool("output", "emit_csv", true)) {
      auto os = open_out(dir / ("scan_" + tag + ".csv"));
      write_scan_csv(rep, os, meta);
    }
    if (cfg.get_bool("output", "emit_plot", true)) {
      auto os = open_out(dir / ("scan_" + tag + ".svg"));
      write_scan_svg(rep, reference, os, meta);
    }

    const auto& vd = rep.verdict;
    v.check("monotone_" + tag, vd.monotone,
            "min increment " + num(vd.min_increment) + " >= -" + num(vd.tolerance));
    double split = 0.0, q_min = 0.0, fmq = 0.0;
    for (const auto& r : rep.rows) {
      split = std::max(split, r.split_residual);
      q_min = std::min(q_min, r.Q);
      fmq = std::max({fmq, std::abs(r.F), std::abs(r.M), std::abs(r.Q)});
    }
    const double split_tol = cfg.get_double("checks", "split_tolerance", 1e-10);
    v.check("hawking_split_" + tag, split <= split_tol && q_min >= 0.0,
            "max |F-(M+Q)| rel " + num(split) + " <= " + num(split_tol) + ", min Q " + num(q_min));
    if (auto tol = cfg.find_double("checks", "max_abs_FMQ")) {
      v.check("null_" + tag, fmq <= *tol, "max |F|,|M|,|Q| " + num(fmq) + " <= " + num(*tol));
    }
    if (auto expected = cfg.find_double("checks", "boundary_value")) {
      if (std::abs(cfg.get_double("checks", "boundary_value_p", p) - p) < 1e-12) {
        const double tol = cfg.get_double("checks", "boundary_tolerance", 1e-6);
        const double got = rep.rows.front().F;
        v.check("boundary_value_" + tag, std::abs(got - *expected) <= tol,
                "F(t_p) " + num(got) + " vs " + num(*expected) + " +- " + num(tol));
      }
    }
    if (auto expected = cfg.find_double("checks", "late_value")) {
      const double tol = cfg.get_double("checks", "late_tolerance", 0.005);
      const double got = rep.rows.back().F;
      const double rel = std::abs(got - *expected) / std::abs(*expected);
      v.check("late_value_" + tag, rel <= tol,
              "F(" + num(rep.rows.back().t) + ") " + num(got) + " vs " + num(*expected) + " rel " +
                  num(rel) + " <= " + num(tol));
    }
    if (auto bound = cfg.find_double("checks", "q_ratio_max")) {
      const double lo = cfg.get_double("checks", "q_ratio_t_lo", 10.0);
      const double hi = cfg.get_double("checks", "q_ratio_t_hi", 1000.0);
      const double ratio = compute_F(pot, hi).Q / compute_F(pot, lo).Q;
      size_t peak = 0;
      for (size_t i = 1; i < rep.rows.size(); ++i) {
        if (rep.rows[i].Q > rep.rows[peak].Q) peak = i;
      }
      bool decreasing = peak + 1 < rep.rows.size();
      for (size_t i = peak + 1; i < rep.rows.size(); ++i) {
        decreasing = decreasing && rep.rows[i].Q <= rep.rows[i - 1].Q;
      }
      v.check("Q_decay_" + tag, ratio <= *bound && decreasing,
              "Q(" + num(hi) + ")/Q(" + num(lo) + ") = " + num(ratio) + " <= " + num(*bound) +
                  ", decreasing after t = " + num(rep.rows[peak].t));
    }
    decay_checks(cfg, pot, v, log);
  }
  return v.exit_code();
}

int cmd_penrose(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const MetricSpec spec = cfg.metric();
  const fs::path dir = output_dir(cfg, opt);
  const OutputMeta meta = meta_for(cfg, "penrose");
  PenroseOptions po;
  po.adm_radii = cfg.get_list("adm", "radii", po.adm_radii);
  po.sobolev_constant = cfg.get_double("penrose", "sobolev_constant", 0.0);
  po.equality_tolerance = cfg.get_double("penrose", "equality_tolerance", po.equality_tolerance);
  const std::vector<double> ps = cfg.has("penrose", "p_list") ? cfg.get_list("penrose", "p_list")
                                                               : cfg.p_values();
  for (double p : ps) require_supported_exponent(p);
  const PenroseReport rep = penrose_chain(spec, ps, po);
  {
    auto os = open_out(dir / "penrose.csv");
    write_penrose_csv(rep, os, meta);
  }
  {
    auto os = open_out(dir / "penrose_summary.txt");
    write_penrose_summary(rep, os, meta);
  }
  write_penrose_summary(rep, log, OutputMeta{meta.config_hash, {}});

  Verdicts v(log);
  v.check("penrose_chain", rep.passed(), rep.verdict_line());
  if (cfg.get_bool("checks", "require_equality", false)) {
    v.check("penrose_equality", rep.equality,
            "sqrt(|dM|/16 pi) " + num(rep.penrose_lhs) + " vs m_ADM " + num(rep.mass));
  }
  if (auto tol = cfg.find_double("checks", "lhs_limit_tolerance")) {
    const double got = rep.lhs_limit.value_or(0.0);
    const double rel = std::abs(got - 2.0 * rep.mass) / (2.0 * rep.mass);
    v.check("lhs_limit", rep.lhs_limit && rel <= *tol,
            "LHS(p -> 1) " + num(got) + " vs 2 m " + num(2.0 * rep.mass) + " rel " + num(rel));
  }
  if (auto tol = cfg.find_double("checks", "capacity_limit_tolerance")) {
    const double got = rep.capacity_limit.value_or(0.0);
    const double rel = std::abs(got - rep.area) / rep.area;
    v.check("capacity_limit", rep.capacity_limit && rel <= *tol,
            "Cap(p -> 1) " + num(got) + " vs |dM| " + num(rep.area) + " rel " + num(rel));
  }
  return v.exit_code();
}

int cmd_identities(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const MetricSpec spec = cfg.metric();
  const fs::path dir = output_dir(cfg, opt);
  const OutputMeta meta = meta_for(cfg, "identities");
  const unsigned seed = opt.seed_given ? opt.seed
                                       : static_cast<unsigned>(cfg.get_int("identities", "seed", 1));
  const double r0 = spec.horizon_radius();
  const int n = cfg.get_int("identities", "points", 100);
  const double r_lo = cfg.get_double("identities", "r_lo", 1.2 * r0);
  const double r_hi = cfg.get_double("identities", "r_hi", 40.0 * r0);
  const double h = cfg.get_double("identities", "h", 0.125);
  const int n_ref = cfg.get_int("identities", "refine_points", 10);
  const double ref_lo = cfg.get_double("identities", "refine_r_lo", 3.0 * r0);
  const double ref_hi = cfg.get_double("identities", "refine_r_hi", 12.0 * r0);
  Verdicts v(log);
  log << "seed " << seed << "\n";
  for (double p : cfg.p_values()) {
    const RadialPotential pot = solve_radial(spec, p);
    const std::string tag = p_tag(p);
    std::vector<PointIdentities> rows;
    double dx = 0.0, ka = 0.0, dy = 0.0, hc = 0.0;
    bool p_ok = true;
    for (const Vec3& x : random_points(seed, n, r_lo, r_hi)) {
      rows.push_back(identities_at(pot, x));
      const auto& r = rows.back();
      dx = std::max(dx, r.div_x.relative());
      ka = std::max(ka, r.kato.relative());
      dy = std::max(dy, r.div_y.relative());
      hc = std::max(hc, r.mean_curvature.relative());
      p_ok = p_ok && r.div_y.p_nonnegative;
    }
    const auto ref_pts = random_points(seed + 1, n_ref, ref_lo, ref_hi);
    const RefinementStudy rs = identity_refinement(pot, ref_pts, h);
    p_ok = p_ok && rs.p_nonnegative;
    {
      auto os = open_out(dir / ("identities_" + tag + ".csv"));
      OutputMeta m = meta;
      m.extra.push_back("seed " + std::to_string(seed));
      m.extra.push_back("refinement h " + num(rs.h_coarse) + " -> " + num(rs.h_fine) +
                        ": divx order " + num(rs.div_x_order) + ", kato order " +
                        num(rs.kato_order) + ", divy order " + num(rs.div_y_order));
      m.extra.push_back("max |D| " + num(rs.max_abs_D_coarse) + " -> " + num(rs.max_abs_D_fine));
      write_identity_csv(rows, os, m);
    }
    log << tag << ": max relative residuals divX " << num(dx) << ", Kato " << num(ka) << ", div Y "
        << num(dy) << ", H " << num(hc) << "\n";
    log << tag << ": grid-path rms residuals divX " << num(rs.div_x_coarse) << " -> "
        << num(rs.div_x_fine) << ", Kato " << num(rs.kato_coarse) << " -> " << num(rs.kato_fine)
        << "\n";
    v.check("P_nonnegative_" + tag, p_ok, "all sampled points");
    if (auto tol = cfg.find_double("checks", "divx_tolerance")) {
      v.check("divx_" + tag, dx <= *tol, num(dx) + " <= " + num(*tol));
    }
    if (auto tol = cfg.find_double("checks", "kato_tolerance")) {
      v.check("kato_" + tag, ka <= *tol, num(ka) + " <= " + num(*tol));
    }
    if (auto tol = cfg.find_double("checks", "divy_tolerance")) {
      v.check("divy_split_" + tag, dy <= *tol, num(dy) + " <= " + num(*tol));
    }
    if (auto tol = cfg.find_double("checks", "mean_curvature_tolerance")) {
      v.check("mean_curvature_" + tag, hc <= *tol, num(hc) + " <= " + num(*tol));
    }
    if (auto lo = cfg.find_double("checks", "divx_order_min")) {
      v.check("divx_order_" + tag, rs.div_x_order >= *lo, num(rs.div_x_order) + " >= " + num(*lo));
    }
    if (auto lo = cfg.find_double("checks", "kato_order_min")) {
      v.check("kato_order_" + tag, rs.kato_order >= *lo, num(rs.kato_order) + " >= " + num(*lo));
    }
  }
  return v.exit_code();
}

int cmd_adm(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const MetricSpec spec = cfg.metric();
  const fs::path dir = output_dir(cfg, opt);
  const OutputMeta meta = meta_for(cfg, "adm");
  AdmOptions ao;
  ao.extrapolate = cfg.get_bool("adm", "extrapolate", true);
  ao.force_quadrature = cfg.get_bool("adm", "quadrature", false);
  ao.n_theta = cfg.get_int("adm", "n_theta", ao.n_theta);
  const AdmEstimate est = adm_mass(spec, cfg.get_list("adm", "radii", {50.0, 100.0, 200.0}), ao);
  {
    auto os = open_out(dir / "adm.csv");
    write_adm_csv(est, os, meta);
  }
  for (size_t i = 0; i < est.radii.size(); ++i) {
    log << "r = " << num(est.radii[i]) << ": m(r) = " << num(est.values[i]) << "\n";
  }
  log << "m_ADM = " << num(est.mass) << " +- " << num(est.spread)
      << (est.extrapolated ? " (extrapolated in 1/r)" : "") << "\n";
  Verdicts v(log);
  if (auto expected = cfg.find_double("checks", "expected_mass")) {
    if (auto tol = cfg.find_double("checks", "mass_tolerance")) {
      const double rel = std::abs(est.mass - *expected) / std::abs(*expected);
      v.check("adm_mass", rel <= *tol, num(est.mass) + " vs " + num(*expected) + " rel " + num(rel));
    }
    if (auto tol = cfg.find_double("checks", "mass_abs_tolerance")) {
      const double err = std::abs(est.mass - *expected);
      v.check("adm_mass_abs", err <= *tol, num(est.mass) + " vs " + num(*expected) + " +- " + num(*tol));
    }
  }
  return v.exit_code();
}

}  // namespace capflow::cli
