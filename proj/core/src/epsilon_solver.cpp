#include "capflow/epsilon_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "capflow/error.hpp"
#include "capflow/levelset.hpp"

namespace capflow {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Link {
  long nbr;      // lattice index of a domain node, or -1 for a boundary crossing
  double theta;  // crossing distance in units of h
  double ub;     // boundary value at the crossing
  bool inner;
};

struct FaceMetric {
  double sqrt_g;
  Vec3 ginv;  // diagonal of g^{-1}
};

// Annulus r_in <= |x| <= r_out discretized on a lattice, optionally as the
// positive octant with mirror planes through the origin.
class Annulus {
 public:
  Annulus(const MetricSpec& metric, Lattice lat, double r_in, double r_out, bool octant, double pin,
          double T, std::function<double(const Vec3&)> outer)
      : metric_(metric), lat_(lat), r_in_(r_in), r_out_(r_out), octant_(octant), pin_(pin), T_(T),
        outer_(std::move(outer)) {
    classify();
  }

  const Lattice& lattice() const { return lat_; }
  const std::vector<NodeState>& state() const { return state_; }
  const std::vector<double>& fixed_values() const { return fixed_; }
  bool domain(size_t idx) const {
    return state_[idx] == NodeState::Interior || state_[idx] == NodeState::Pinned;
  }
  bool unknown(size_t idx) const { return state_[idx] == NodeState::Interior; }

  long neighbor(size_t idx, int axis, int sign) const {
    auto c = lat_.coords(idx);
    c[axis] += sign;
    if (octant_ && c[axis] < 0) c[axis] = -c[axis];
    if (!lat_.valid(c[0], c[1], c[2])) return -1;
    return static_cast<long>(lat_.index(c[0], c[1], c[2]));
  }

  int planes(size_t idx) const {
    if (!octant_) return 0;
    const auto c = lat_.coords(idx);
    return (c[0] == 0) + (c[1] == 0) + (c[2] == 0);
  }
  double row_scale(size_t idx) const { return std::ldexp(1.0, -planes(idx)); }
  double multiplicity(size_t idx) const { return octant_ ? std::ldexp(1.0, 3 - planes(idx)) : 1.0; }

  Link link(size_t idx, int axis, int sign) const {
    const long nb = neighbor(idx, axis, sign);
    if (nb < 0) throw DomainError("annulus touches the lattice edge");
    if (domain(static_cast<size_t>(nb))) return {nb, 1.0, 0.0, false};
    const bool inner = state_[nb] == NodeState::Hole;
    const Vec3 P = position(idx);
    const double t = crossing(P, axis, sign, inner ? r_in_ : r_out_);
    Link l{-1, std::clamp(t / lat_.h, 1e-12, 1.0), 0.0, inner};
    if (!inner) {
      Vec3 y = P;
      y(axis) += sign * t;
      l.ub = outer_value(y);
    }
    return l;
  }

  FaceMetric face_metric(const Vec3& x) const {
    if (metric_.is_radial()) {
      const double phi = metric_.profile().phi(x.norm());
      const double phi2 = phi * phi;
      return {phi2 * phi2 * phi2, Vec3::Constant(1.0 / (phi2 * phi2))};
    }
    const Mat3 g = metric_components(metric_, x);
    const double det = g.determinant();
    if (!(det > 0.0) || g.diagonal().minCoeff() <= 0.0) throw DomainError("degenerate metric at a grid face");
    const Mat3 gi = g.inverse();
    const double off = std::max({std::abs(gi(0, 1)), std::abs(gi(0, 2)), std::abs(gi(1, 2))});
    if (off > 1e-10 * gi.diagonal().maxCoeff()) {
      throw DomainError("seven-point stencil needs a diagonal inverse metric");
    }
    return {std::sqrt(det), gi.diagonal()};
  }

  double node_sqrt_g(size_t idx) const { return face_metric(position(idx)).sqrt_g; }

  Vec3 position(size_t idx) const {
    const auto c = lat_.coords(idx);
    return lat_.position(c[0], c[1], c[2]);
  }

  double outer_value(const Vec3& x) const { return outer_ ? outer_(x) : T_; }
  double r_in() const { return r_in_; }

 private:
  static double crossing(const Vec3& P, int axis, int sign, double R) {
    const double b = sign * P(axis);
    const double c = P.squaredNorm() - R * R;
    const double disc = std::max(0.0, b * b - c);
    const double s = std::sqrt(disc);
    const double t1 = -b - s, t2 = -b + s;
    if (t1 >= 0.0) return t1;
    return std::max(t2, 0.0);
  }

  void classify() {
    const size_t n = lat_.size();
    state_.assign(n, NodeState::Interior);
    fixed_.assign(n, 0.0);
    for (size_t idx = 0; idx < n; ++idx) {
      const Vec3 x = position(idx);
      const double r = x.norm();
      if (r < r_in_) {
        state_[idx] = NodeState::Hole;
      } else if (r > r_out_) {
        state_[idx] = NodeState::Outside;
        fixed_[idx] = outer_value(x);
      }
    }
    std::vector<size_t> pinned;
    std::vector<double> pinned_value;
    for (size_t idx = 0; idx < n; ++idx) {
      if (state_[idx] != NodeState::Interior) continue;
      if (on_lattice_edge(idx)) {
        pinned.push_back(idx);
        pinned_value.push_back(0.0);
        continue;
      }
      double best = 2.0, value = 0.0;
      for (int axis = 0; axis < 3; ++axis) {
        for (int sign : {-1, 1}) {
          const Link l = link(idx, axis, sign);
          if (l.nbr < 0 && l.theta < best) { best = l.theta; value = l.ub; }
        }
      }
      if (best < pin_) { pinned.push_back(idx); pinned_value.push_back(value); }
    }
    for (size_t i = 0; i < pinned.size(); ++i) {
      state_[pinned[i]] = NodeState::Pinned;
      fixed_[pinned[i]] = pinned_value[i];
    }
  }

  bool on_lattice_edge(size_t idx) const {
    const auto c = lat_.coords(idx);
    for (int a = 0; a < 3; ++a) {
      if (c[a] == lat_.n[a] - 1 || (c[a] == 0 && !octant_)) return true;
    }
    return false;
  }

  const MetricSpec& metric_;
  Lattice lat_;
  double r_in_, r_out_;
  bool octant_;
  double pin_;
  double T_;
  std::function<double(const Vec3&)> outer_;
  std::vector<NodeState> state_;
  std::vector<double> fixed_;
};

inline double lagged_weight(double q, double eps, double p) {
  if (p == 2.0) return 1.0;
  return std::pow(q + eps * eps, 0.5 * (p - 2.0));
}

// Boundary-aware three-point gradient at an unknown node.
Vec3 node_gradient(const Annulus& an, const std::vector<double>& u, size_t idx) {
  const double h = an.lattice().h;
  Vec3 g;
  for (int axis = 0; axis < 3; ++axis) {
    const Link lp = an.link(idx, axis, +1);
    const Link lm = an.link(idx, axis, -1);
    const double up = lp.nbr >= 0 ? u[lp.nbr] : lp.ub;
    const double um = lm.nbr >= 0 ? u[lm.nbr] : lm.ub;
    const double hp = lp.theta * h, hm = lm.theta * h;
    g(axis) = (hm * hm * (up - u[idx]) + hp * hp * (u[idx] - um)) / (hp * hm * (hp + hm));
  }
  return g;
}

struct FaceVisitor {
  // c * (u_Q - u_P) enters rows P and Q with opposite signs.
  std::function<void(size_t, size_t, double)> edge;
  // c * (ub - u_P) enters row P.
  std::function<void(size_t, double, double, bool)> cut;
};

// Visits every flux face of the annulus with its lagged-diffusivity coefficient.
void visit_faces(const Annulus& an, const std::vector<double>& u, double p, double eps,
                 const FaceVisitor& vis) {
  const Lattice& lat = an.lattice();
  const double h = lat.h;
  const size_t n = lat.size();
  std::vector<Vec3> grad(n, Vec3::Zero());
  for (size_t idx = 0; idx < n; ++idx) {
    if (an.unknown(idx)) grad[idx] = node_gradient(an, u, idx);
  }
  for (size_t P = 0; P < n; ++P) {
    if (!an.domain(P)) continue;
    const auto c = lat.coords(P);
    const Vec3 xP = lat.position(c[0], c[1], c[2]);
    for (int axis = 0; axis < 3; ++axis) {
      auto cq = c;
      cq[axis] += 1;
      if (!lat.valid(cq[0], cq[1], cq[2])) continue;
      const size_t Q = lat.index(cq[0], cq[1], cq[2]);
      if (!an.domain(Q) || (!an.unknown(P) && !an.unknown(Q))) continue;
      Vec3 mid = xP;
      mid(axis) += 0.5 * h;
      const FaceMetric fm = an.face_metric(mid);
      Vec3 d;
      if (an.unknown(P) && an.unknown(Q)) d = 0.5 * (grad[P] + grad[Q]);
      else d = an.unknown(P) ? grad[P] : grad[Q];
      d(axis) = (u[Q] - u[P]) / h;
      const double q = fm.ginv.dot(d.cwiseProduct(d));
      const double coef = fm.sqrt_g * fm.ginv(axis) * lagged_weight(q, eps, p) * an.row_scale(Q);
      vis.edge(P, Q, coef);
    }
    if (!an.unknown(P)) continue;
    for (int axis = 0; axis < 3; ++axis) {
      for (int sign : {-1, 1}) {
        const Link l = an.link(P, axis, sign);
        if (l.nbr >= 0) continue;
        Vec3 mid = xP;
        mid(axis) += 0.5 * sign * l.theta * h;
        const FaceMetric fm = an.face_metric(mid);
        Vec3 d = grad[P];
        d(axis) = (l.ub - u[P]) / (l.theta * h);
        const double q = fm.ginv.dot(d.cwiseProduct(d));
        const double coef =
            fm.sqrt_g * fm.ginv(axis) * lagged_weight(q, eps, p) * an.row_scale(P) / l.theta;
        vis.cut(P, coef, l.ub, l.inner);
      }
    }
  }
}

struct Rows {
  std::vector<double> row;  // scaled (A u - b) per lattice node
  std::vector<double> rhs;  // scaled b per lattice node
};

Rows evaluate_rows(const Annulus& an, const std::vector<double>& u, double p, double eps) {
  const size_t n = an.lattice().size();
  Rows r{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  FaceVisitor vis;
  vis.edge = [&](size_t P, size_t Q, double c) {
    if (an.unknown(P)) {
      r.row[P] -= c * (u[Q] - u[P]);
      if (!an.unknown(Q)) r.rhs[P] += c * u[Q];
    }
    if (an.unknown(Q)) {
      r.row[Q] -= c * (u[P] - u[Q]);
      if (!an.unknown(P)) r.rhs[Q] += c * u[P];
    }
  };
  vis.cut = [&](size_t P, double c, double ub, bool) {
    r.row[P] -= c * (ub - u[P]);
    r.rhs[P] += c * ub;
  };
  visit_faces(an, u, p, eps, vis);
  return r;
}

double relative_residual(const Annulus& an, const Rows& rows) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < rows.row.size(); ++i) {
    if (!an.unknown(i)) continue;
    const double s = an.row_scale(i), m = an.multiplicity(i);
    num += m * (rows.row[i] / s) * (rows.row[i] / s);
    den += m * (rows.rhs[i] / s) * (rows.rhs[i] / s);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void require_inputs(double p, double eps, const GridConfig& cfg, const OuterBoundary& outer) {
  if (!(p > 1.0 && p < 3.0)) throw ParameterError("exponent p must lie in (1,3)");
  if (!(eps > 0.0)) throw ParameterError("regularization eps must be positive");
  if (!(outer.T > 0.0 && outer.T < 1.0)) throw ParameterError("outer level T must lie in (0,1)");
  if (!(cfg.spacing > 0.0)) throw ParameterError("grid spacing must be positive");
  if (!(cfg.inner_radius > 0.0 && cfg.outer_radius > cfg.inner_radius + 2.0 * cfg.spacing)) {
    throw ParameterError("annulus radii must satisfy 0 < r_in < r_out - 2h");
  }
  if (!(cfg.tol_picard > 0.0 && cfg.tol_lin > 0.0) || cfg.max_sweeps < 1) {
    throw ParameterError("solver tolerances must be positive");
  }
}

void require_reflection_symmetry(const MetricSpec& spec, const OuterBoundary& outer, double r_out) {
  const Vec3 probes[] = {{0.31, 0.52, 0.77}, {1.1, 0.2, 0.4}, {0.05, 0.9, 0.3}};
  for (Vec3 x : probes) {
    x *= 0.8 * r_out / x.norm();
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 y = x;
      y(axis) = -y(axis);
      if (!spec.is_radial()) {
        const Mat3 a = metric_components(spec, x), b = metric_components(spec, y);
        if ((a.diagonal() - b.diagonal()).cwiseAbs().maxCoeff() > 1e-12 * a.diagonal().cwiseAbs().maxCoeff()) {
          throw ParameterError("octant symmetry requested for a metric without reflection symmetry");
        }
      }
      if (outer.values) {
        const Vec3 xs = x * (r_out / x.norm()), ys = y * (r_out / y.norm());
        if (std::abs(outer.values(xs) - outer.values(ys)) > 1e-12) {
          throw ParameterError("octant symmetry requested for asymmetric outer data");
        }
      }
    }
  }
}

void fill_ghosts(GridField& f) {
  const Lattice& lat = f.lattice;
  const size_t n = lat.size();
  std::vector<double> ghost(n, 0.0);
  std::vector<int> count(n, 0);
  for (size_t idx = 0; idx < n; ++idx) {
    if (f.state[idx] != NodeState::Hole && f.state[idx] != NodeState::Outside) continue;
    const auto c = lat.coords(idx);
    for (int axis = 0; axis < 3; ++axis) {
      for (int sign : {-1, 1}) {
        auto c1 = c, c2 = c;
        c1[axis] += sign;
        c2[axis] += 2 * sign;
        if (!lat.valid(c2[0], c2[1], c2[2])) continue;
        if (!f.in_domain(c1[0], c1[1], c1[2]) || !f.in_domain(c2[0], c2[1], c2[2])) continue;
        ghost[idx] += 2.0 * f.at(c1[0], c1[1], c1[2]) - f.at(c2[0], c2[1], c2[2]);
        ++count[idx];
      }
    }
  }
  for (size_t idx = 0; idx < n; ++idx) {
    if (count[idx] > 0) {
      f.u[idx] = ghost[idx] / count[idx];
      f.state[idx] = NodeState::Ghost;
    }
  }
}

Annulus field_annulus(const GridField& f) {
  return Annulus(f.metric, f.lattice, f.r_in, f.r_out, false, f.pin_fraction, f.T, f.outer_values);
}

// Solver values on the lattice: domain nodes keep u, the rest fixed data.
std::vector<double> solver_values(const Annulus& an, const GridField& f) {
  std::vector<double> u = an.fixed_values();
  for (size_t i = 0; i < u.size(); ++i) {
    if (an.domain(i)) u[i] = f.u[i];
  }
  return u;
}

}  // namespace

OuterBoundary OuterBoundary::oracle(const RadialPotential& pot, double outer_radius) {
  const double T = pot.u(outer_radius);
  auto src = std::make_shared<const RadialPotential>(pot);
  auto values = [src](const Vec3& x) { return src->u(std::min(x.norm(), src->r_max())); };
  return trace(T, values);
}

GridField solve_regularized(const MetricSpec& spec, double p, double eps, const GridConfig& cfg,
                            const OuterBoundary& outer) {
  require_inputs(p, eps, cfg, outer);
  if (spec.horizon_radius() > cfg.inner_radius * (1.0 + 1e-12)) {
    throw DomainError("inner sphere lies inside the horizon");
  }
  const bool octant = cfg.symmetry == Symmetry::Octant;
  if (octant) require_reflection_symmetry(spec, outer, cfg.outer_radius);

  const double h = cfg.spacing;
  const int m = static_cast<int>(std::ceil(cfg.outer_radius / h - 1e-9)) + 1;
  Lattice solve_lat;
  solve_lat.h = h;
  if (octant) {
    solve_lat.n = {m + 1, m + 1, m + 1};
    solve_lat.origin = Vec3::Zero();
  } else {
    solve_lat = Lattice::centered(m * h, h);
  }
  const Annulus an(spec, solve_lat, cfg.inner_radius, cfg.outer_radius, octant, cfg.pin_fraction,
                   outer.T, outer.values);

  const size_t n = solve_lat.size();
  std::vector<int> id(n, -1);
  std::vector<size_t> node_of;
  for (size_t i = 0; i < n; ++i) {
    if (an.unknown(i)) {
      id[i] = static_cast<int>(node_of.size());
      node_of.push_back(i);
    }
  }
  const auto nu = static_cast<Eigen::Index>(node_of.size());
  if (nu == 0) throw ParameterError("annulus contains no unknown nodes");

  std::vector<double> u = an.fixed_values();
  SolverLog log;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setMaxIterations(50000);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(nu) * 7);
  Eigen::VectorXd b(nu), x(nu);
  for (Eigen::Index i = 0; i < nu; ++i) x(i) = 0.5 * outer.T;

  auto assemble = [&](double p_eff) {
    trip.clear();
    b.setZero();
    FaceVisitor vis;
    vis.edge = [&](size_t P, size_t Q, double c) {
      const int iP = id[P], iQ = id[Q];
      if (iP >= 0) trip.emplace_back(iP, iP, c);
      if (iQ >= 0) trip.emplace_back(iQ, iQ, c);
      if (iP >= 0 && iQ >= 0) {
        trip.emplace_back(iP, iQ, -c);
        trip.emplace_back(iQ, iP, -c);
      } else if (iP >= 0) {
        b(iP) += c * u[Q];
      } else {
        b(iQ) += c * u[P];
      }
    };
    vis.cut = [&](size_t P, double c, double ub, bool) {
      trip.emplace_back(id[P], id[P], c);
      b(id[P]) += c * ub;
    };
    visit_faces(an, u, p_eff, eps, vis);
    SpMat A(nu, nu);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
  };
  auto linear_solve = [&](const SpMat& A, double tol) {
    cg.setTolerance(tol);
    cg.compute(A);
    x = cg.solveWithGuess(b, x);
    log.linear_iterations += cg.iterations();
    if (cg.info() != Eigen::Success && cg.error() > 10.0 * tol) {
      throw ConvergenceError("conjugate gradient did not reach its tolerance", log.residual_history);
    }
  };
  auto scatter = [&]() {
    double diff = 0.0;
    for (Eigen::Index i = 0; i < nu; ++i) {
      diff = std::max(diff, std::abs(x(i) - u[node_of[i]]));
      u[node_of[i]] = x(i);
    }
    return diff;
  };

  // Start from the p = 2 solution.
  linear_solve(assemble(2.0), 0.1 * cfg.tol_lin);
  scatter();

  double diff = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const SpMat A = assemble(p);
    Eigen::VectorXd ux(nu);
    for (Eigen::Index i = 0; i < nu; ++i) ux(i) = u[node_of[i]];
    Eigen::VectorXd r = A * ux - b;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < nu; ++i) {
      const size_t P = node_of[i];
      const double s = an.row_scale(P), mult = an.multiplicity(P);
      num += mult * (r(i) / s) * (r(i) / s);
      den += mult * (b(i) / s) * (b(i) / s);
    }
    const double rel = std::sqrt(num / den);
    log.residual_history.push_back(rel);
    log.sweeps = sweep;
    if (diff < cfg.tol_picard && rel < cfg.tol_lin) {
      log.converged = true;
      break;
    }
    const double tol = std::max(0.1 * cfg.tol_lin, std::min(1e-4, 0.01 * rel));
    linear_solve(A, tol);
    diff = scatter();
    log.update_history.push_back(diff);
    if (!std::isfinite(diff)) throw NumericalError("non-finite Picard iterate");
  }
  if (!log.converged) {
    throw ConvergenceError("Picard iteration did not converge within max_sweeps", log.residual_history);
  }

  GridField f;
  f.lattice = octant ? Lattice::centered(m * h, h) : solve_lat;
  f.metric = spec;
  f.p = p;
  f.eps = eps;
  f.T = outer.T;
  f.r_in = cfg.inner_radius;
  f.r_out = cfg.outer_radius;
  f.outer_trace = static_cast<bool>(outer.values);
  f.outer_values = outer.values;
  f.tol_picard = cfg.tol_picard;
  f.tol_lin = cfg.tol_lin;
  f.pin_fraction = cfg.pin_fraction;
  f.octant = octant;
  f.log = std::move(log);
  if (octant) {
    const Annulus full(spec, f.lattice, f.r_in, f.r_out, false, f.pin_fraction, f.T, f.outer_values);
    f.state = full.state();
    f.u = full.fixed_values();
    for (size_t idx = 0; idx < f.lattice.size(); ++idx) {
      if (f.state[idx] != NodeState::Interior) continue;
      const auto c = f.lattice.coords(idx);
      const size_t src = solve_lat.index(std::abs(c[0] - m), std::abs(c[1] - m), std::abs(c[2] - m));
      f.u[idx] = u[src];
    }
  } else {
    f.state = an.state();
    f.u = u;
  }
  fill_ghosts(f);
  return f;
}

std::vector<double> residual_field(const GridField& field) {
  if (field.lattice.size() != field.u.size()) throw ParameterError("field size mismatch");
  const Annulus an = field_annulus(field);
  const std::vector<double> u = solver_values(an, field);
  const Rows rows = evaluate_rows(an, u, field.p, field.eps);
  const double h2 = field.lattice.h * field.lattice.h;
  std::vector<double> out(u.size(), 0.0);
  for (size_t i = 0; i < u.size(); ++i) {
    if (an.unknown(i)) out[i] = -rows.row[i] / (an.node_sqrt_g(i) * h2);
  }
  return out;
}

ResidualNorms residual(const GridField& field) {
  const Annulus an = field_annulus(field);
  const std::vector<double> u = solver_values(an, field);
  const Rows rows = evaluate_rows(an, u, field.p, field.eps);
  const double h2 = field.lattice.h * field.lattice.h;
  ResidualNorms out;
  double sq = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    if (!an.unknown(i)) continue;
    const double v = std::abs(rows.row[i]) / (an.node_sqrt_g(i) * h2);
    out.max_abs = std::max(out.max_abs, v);
    sq += v * v;
    ++count;
  }
  out.rms = count ? std::sqrt(sq / count) : 0.0;
  out.relative = relative_residual(an, rows);
  return out;
}

double c_p_epsilon_boundary(const GridField& field) {
  const Annulus an = field_annulus(field);
  const std::vector<double> u = solver_values(an, field);
  const double h = field.lattice.h;
  const double r_mid = 0.5 * (field.r_in + field.r_out);
  double flux = 0.0;
  FaceVisitor vis;
  // Edge coefficients already hold sqrt(g) g^{dd} w; multiply by h^2 / h for the face flux.
  vis.edge = [&](size_t P, size_t Q, double c) {
    const bool p_inner_pin = !an.unknown(P) && an.position(P).norm() < r_mid;
    const bool q_inner_pin = !an.unknown(Q) && an.position(Q).norm() < r_mid;
    if (p_inner_pin) flux += c * (u[Q] - u[P]) * h;
    if (q_inner_pin) flux += c * (u[P] - u[Q]) * h;
  };
  vis.cut = [&](size_t P, double c, double ub, bool inner) {
    if (inner) flux += c * (u[P] - ub) * h;
  };
  visit_faces(an, u, field.p, field.eps, vis);
  if (!(flux > 0.0)) throw GeometryError("inner boundary flux is not positive");
  return std::pow(flux / (4.0 * std::numbers::pi), 1.0 / (field.p - 1.0));
}

CpEpsilon c_p_epsilon(const GridField& field, std::optional<double> level_tau) {
  CpEpsilon out;
  const double e = 1.0 / (field.p - 1.0);
  out.boundary = c_p_epsilon_boundary(field);
  out.level_tau = level_tau.value_or(0.5 * field.T);
  const LevelSurface surf = extract_level(field, out.level_tau);
  const double eps2 = field.eps * field.eps;
  const double p = field.p;
  const double level_flux = surface_integral(surf, [eps2, p](const SurfaceSample& s) {
                              return std::pow(s.grad_norm * s.grad_norm + eps2, 0.5 * (p - 2.0)) * s.grad_norm;
                            }).value;
  out.level = std::pow(level_flux / (4.0 * std::numbers::pi), e);
  out.relative_gap = std::abs(out.level - out.boundary) / out.boundary;
  return out;
}

GridField sample_radial_field(const RadialPotential& pot, const Lattice& lattice, double eps) {
  GridField f;
  f.lattice = lattice;
  f.metric = pot.metric();
  f.p = pot.p();
  f.eps = eps;
  f.r_in = pot.r_min();
  f.r_out = pot.r_max();
  f.u.assign(lattice.size(), 0.0);
  f.state.assign(lattice.size(), NodeState::Interior);
  const double r0 = pot.r_min();
  const double d1 = pot.du(r0), d2 = pot.d2u(r0);
  double top = 0.0;
  for (size_t idx = 0; idx < lattice.size(); ++idx) {
    const auto c = lattice.coords(idx);
    const double r = lattice.position(c[0], c[1], c[2]).norm();
    if (r > pot.r_max()) throw DomainError("lattice extends beyond the radial grid");
    if (r < r0) {
      const double s = r - r0;
      f.u[idx] = d1 * s + 0.5 * d2 * s * s;
      f.state[idx] = NodeState::Ghost;
    } else {
      f.u[idx] = pot.u(r);
      top = std::max(top, f.u[idx]);
    }
  }
  f.T = std::min(top, 1.0 - 1e-15);
  f.log.converged = true;
  return f;
}

std::vector<RadialAverage> radial_averages(const GridField& field) {
  const Lattice& lat = field.lattice;
  const double h = lat.h;
  std::vector<RadialAverage> bins;
  std::vector<double> sum;
  for (size_t idx = 0; idx < lat.size(); ++idx) {
    const auto c = lat.coords(idx);
    if (!field.in_domain(c[0], c[1], c[2])) continue;
    const double r = lat.position(c[0], c[1], c[2]).norm();
    const auto b = static_cast<size_t>(r / h);
    if (b >= bins.size()) {
      bins.resize(b + 1, RadialAverage{0.0, 0.0, 1e300, -1e300, 0});
      sum.resize(b + 1, 0.0);
    }
    auto& bin = bins[b];
    bin.r += r;
    sum[b] += field.u[idx];
    bin.min = std::min(bin.min, field.u[idx]);
    bin.max = std::max(bin.max, field.u[idx]);
    ++bin.count;
  }
  std::vector<RadialAverage> out;
  for (size_t b = 0; b < bins.size(); ++b) {
    if (bins[b].count == 0) continue;
    RadialAverage a = bins[b];
    a.r /= a.count;
    a.mean = sum[b] / a.count;
    out.push_back(a);
  }
  return out;
}

}  // namespace capflow
