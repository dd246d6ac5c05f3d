#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "capflow/grid.hpp"
#include "capflow/radial.hpp"

namespace capflow {

struct SurfaceSample {
  Vec3 position;
  double weight = 0.0;          // g-area carried by the sample
  double grad_norm = 0.0;       // |grad u|_g
  double mean_curvature = 0.0;  // H_g, outward normal grad u / |grad u|
  double u = 0.0;
};

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// A level set {u = tau} as weighted samples. Radial levels are one sphere
/// sample; grid levels are marching-tetrahedra meshes with per-vertex data.
struct LevelSurface {
  double level = 0.0;
  bool radial = false;
  double radius = 0.0;  // radial levels only
  std::vector<SurfaceSample> samples;
  SurfaceMesh mesh;
  bool regular = true;
  double total_area = 0.0;
  /// Same level re-extracted on the stride-2 sublattice (grid sources).
  std::shared_ptr<const LevelSurface> coarse;
};

/// Radial level by monotone inversion of u.
LevelSurface extract_level(const RadialPotential& pot, double tau);
/// Radial level addressed by omega = 1 - tau, exact for levels close to 1.
LevelSurface extract_level_one_minus(const RadialPotential& pot, double omega);

struct ExtractOptions {
  bool with_coarse = true;
  double regularity_floor = 1e-6;  // relative to the field's max |grad u|
};

LevelSurface extract_level(const GridField& field, double tau, const ExtractOptions& opts = {});

/// Surface built from an explicit mesh with Euclidean weights (synthetic inputs).
LevelSurface surface_from_mesh(SurfaceMesh mesh, double level = 0.0);

struct IntegralResult {
  double value = 0.0;
  std::optional<double> error_estimate;
};

IntegralResult surface_integral(const LevelSurface& surface,
                                const std::function<double(const SurfaceSample&)>& integrand);

struct EulerEstimate {
  double chi = 2.0;
  int components = 1;
  /// Connected with 4 pi - 2 pi chi >= 0, i.e. no more than a sphere.
  bool expectation_ok = true;
};

EulerEstimate gauss_bonnet_check(const LevelSurface& surface);

/// Plain-text mesh: vertex lines "v x y z grad_norm H weight", face lines "f a b c".
void write_mesh(const LevelSurface& surface, std::ostream& os);

/// |grad u|_g and H_g at x from a coordinate jet.
struct JetLevelGeometry {
  double grad_norm;
  double mean_curvature;
};
JetLevelGeometry jet_level_geometry(const MetricSpec& metric, const Vec3& x, const PointJet& jet);

/// Largest |grad u|_g over domain nodes (centered differences).
double max_gradient_norm(const GridField& field);

}  // namespace capflow
