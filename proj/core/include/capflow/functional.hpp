#pragma once

#include <optional>
#include <vector>

#include "capflow/epsilon_solver.hpp"
#include "capflow/levelset.hpp"
#include "capflow/radial.hpp"

namespace capflow {

/// t <-> alpha_p(t) = 1 - (t_p / t)^{(3-p)/(p-1)} with t_p = ((p-1)/(3-p) c)^{(p-1)/(3-p)}.
class Reparametrization {
 public:
  Reparametrization(double p, double c);
  double p() const { return p_; }
  double c() const { return c_; }
  double t_p() const { return t_p_; }
  double alpha(double t) const;
  /// 1 - alpha(t), accurate for large t.
  double one_minus_alpha(double t) const;
  double t_of(double alpha) const;
  /// Upper end of the t-range when the potential is only known on {u <= T}.
  double t_max(double T) const;

 private:
  double p_, c_, t_p_, e_;
};

double reparam_alpha(double p, double c, double t);
double reparam_inverse(double p, double c, double alpha);

struct FunctionalValue {
  double t = 0.0;
  double alpha = 0.0;
  double area = 0.0;
  double flux = 0.0;      // integral of |grad u|^{p-1}
  double willmore = 0.0;  // integral of H^2
  double F = 0.0;
  double M = 0.0;
  double Q = 0.0;
  bool regular = true;
  /// |F - (M + Q)| over the size of the terms being combined.
  double split_residual = 0.0;
};

/// Three-term form and Hawking split on one level, given c and the surface.
FunctionalValue functional_on_level(const LevelSurface& surf, double p, double c, double t,
                                    double one_minus_level);

FunctionalValue compute_F(const RadialPotential& pot, double t);
/// Grid source: uses c_{p,eps} from the inner boundary flux of the field.
FunctionalValue compute_F(const GridField& field, double t);
FunctionalValue compute_F_epsilon(const GridField& field, double t);
FunctionalValue compute_F_epsilon(const GridField& field, double t, double c_eps);

struct MonotonicityVerdict {
  double min_increment = 0.0;
  double tolerance = 0.0;  // absolute: tol_mono times the F scale
  bool monotone = true;
  double boundary_value = 0.0;
  double tail_estimate = 0.0;
};

struct MonotonicityReport {
  double p = 2.0;
  double eps = 0.0;
  double c = 1.0;
  double t_p = 1.0;
  std::vector<FunctionalValue> rows;
  MonotonicityVerdict verdict;
};

constexpr double kTolMonoOracle = 1e-8;
constexpr double kTolMonoGrid = 1e-3;

MonotonicityReport monotonicity_scan(const RadialPotential& pot, const std::vector<double>& t_grid,
                                     double tol_mono = kTolMonoOracle);
MonotonicityReport monotonicity_scan(const GridField& field, const std::vector<double>& t_grid,
                                     double tol_mono = kTolMonoGrid);

/// n points from t_min to t_max, geometric when log_spaced.
std::vector<double> make_t_grid(double t_min, double t_max, int n, bool log_spaced);

struct DefectResult {
  double s = 0.0, t = 0.0;
  double lhs = 0.0;  // F^eps(t) - F^eps(s)
  double rhs = 0.0;  // nonpositive volume term
  double kernel_max = 0.0;
  bool holds = false;
};

DefectResult approx_monotonicity_defect(const GridField& field, double s, double t);

}  // namespace capflow
