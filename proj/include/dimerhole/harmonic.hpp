#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dimerhole/geometry.hpp"

namespace dimerhole {

// Uniform node grid over a domain's bounding box. Nodes strictly inside the
// domain are unknowns. Each unknown keeps four arms (E, N, W, S), cut short
// where the segment to the next node meets the boundary, which gives the
// Shortley-Weller stencil on curved or off-grid boundaries.
struct MeshGeometry {
  struct Arm {
    double length = 1.0;  // in mesh units
    int neighbour = -1;   // unknown index, or -1 when the arm ends on the boundary
    int component = -1;   // boundary component hit (0 outer, j hole j)
    Point end;
  };

  DomainSpec spec;
  double h = 0.0;
  double x0 = 0.0, y0 = 0.0;
  int nx = 0, ny = 0;
  std::vector<int> unknown;  // per node, row-major; -1 outside
  std::vector<int> node_of;  // per unknown
  std::vector<std::array<Arm, 4>> arms;

  Point node_position(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  Point position(int u) const {
    return node_position(node_of[u] % nx, node_of[u] / nx);
  }
  int unknown_at(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
    return unknown[j * nx + i];
  }
  int size() const { return static_cast<int>(node_of.size()); }
  // Whether the cell with lower-left node (i, j) lies inside the domain with
  // no boundary crossing on its edges.
  bool full_cell(int i, int j) const;
};

using Polyline = std::vector<Point>;

// Quadratic least-squares fit to nodal and boundary data around a point.
struct LocalFit {
  Point center;
  double h = 1.0;
  Eigen::Matrix<double, 6, 1> coef = Eigen::Matrix<double, 6, 1>::Zero();

  double value(Point p) const;
  Point gradient(Point p) const;
};

class HarmonicField {
 public:
  using BoundaryData = std::function<double(int component, Point p)>;

  HarmonicField(std::shared_ptr<const MeshGeometry> mesh,
                std::vector<double> values, BoundaryData boundary);

  const MeshGeometry& mesh() const { return *mesh_; }
  bool same_mesh(const HarmonicField& other) const {
    return mesh_ == other.mesh_;
  }
  const std::vector<double>& values() const { return values_; }
  double boundary_value(int component, Point p) const {
    return boundary_(component, p);
  }

  // Interior evaluation (bilinear in full cells, local fit near the
  // boundary). Throws kPathLeavesDomain outside the domain.
  double value(Point p) const;
  Point gradient(Point p) const;
  // Like value(), but boundary points (within 1e-9 of a component) return
  // the prescribed boundary data.
  double value_or_boundary(Point p) const;

  Point node_gradient(int u) const;
  LocalFit fit_near(Point p) const;
  // Largest stencil residual over all unknowns (mesh units).
  double max_residual() const;
  double min_value() const;
  double max_value() const;

 private:
  double arm_value(int u, int d) const;

  std::shared_ptr<const MeshGeometry> mesh_;
  std::vector<double> values_;
  BoundaryData boundary_;
};

// g_U(., source) = regular part - log|z - source| / (2 pi).
class GreensFunction {
 public:
  GreensFunction(HarmonicField regular, Point source)
      : regular_(std::move(regular)), source_(source) {}

  Point source() const { return source_; }
  const HarmonicField& regular_part() const { return regular_; }
  // Zero on the boundary; throws kCoincidentPoints at the source.
  double operator()(Point z) const;

 private:
  HarmonicField regular_;
  Point source_;
};

// Factorises the Shortley-Weller Laplacian once for a domain and mesh size;
// every harmonic measure and Green's function reuses the factorisation.
class HarmonicSolver {
 public:
  // Throws kMeshTooCoarse unless every hole and every gap between boundary
  // components spans at least 8 mesh cells, kSolverDiverged if the
  // factorisation fails.
  HarmonicSolver(const DomainSpec& spec, double h);
  ~HarmonicSolver();
  HarmonicSolver(const HarmonicSolver&) = delete;
  HarmonicSolver& operator=(const HarmonicSolver&) = delete;

  const DomainSpec& spec() const { return mesh_->spec; }
  const MeshGeometry& mesh() const { return *mesh_; }
  std::shared_ptr<const MeshGeometry> mesh_ptr() const { return mesh_; }

  HarmonicField solve(HarmonicField::BoundaryData boundary) const;
  // f_j: 1 on hole j (1-based), 0 on the other components.
  HarmonicField harmonic_measure(int j) const;
  std::vector<HarmonicField> harmonic_measures() const;
  // Throws kSourceTooCloseToBoundary within 4 mesh cells of the boundary.
  GreensFunction greens_function(Point source) const;

 private:
  struct Factor;
  std::shared_ptr<MeshGeometry> mesh_;
  std::unique_ptr<Factor> factor_;
};

// tau_ij = (1/2) int grad f_i . grad f_j by midpoint quadrature over cells
// (subsampled in cells cut by the boundary). Throws kMismatchedMeshes.
Eigen::MatrixXd scale_matrix(const std::vector<HarmonicField>& fields);

// Increment of W = f + i f* along a polyline: the real part is the change in
// f, the imaginary part the integral of the conjugate differential
// -f_y dx + f_x dy. Endpoints may lie on the boundary; every other sample
// point must be inside (kPathLeavesDomain).
std::complex<double> complex_measure_path(const HarmonicField& field,
                                          const Polyline& path);

// Counter-clockwise grid-aligned rectangle `cells` mesh cells outside the
// bounding box of hole j (1-based).
Polyline hole_contour(const MeshGeometry& mesh, int j, int cells = 2);

// Axis-aligned path through mesh nodes at least two cells from the boundary,
// joined straight to the endpoints (which may lie on the boundary).
Polyline interior_path(const MeshGeometry& mesh, Point from, Point to);

struct SurfaceData {
  int genus = 0;
  Eigen::MatrixXd tau;
  // a_periods(i, l) = contour integral of dW_l around hole i.
  Eigen::MatrixXcd a_periods;
  // omega_j = sum_l omega_coeffs(l, j) dW_l, normalised to unit A-periods.
  Eigen::MatrixXcd omega_coeffs;
  Eigen::MatrixXcd period_matrix;
  // abel(j - 1, k) = integral of omega_k from d_0 to d_j inside U.
  Eigen::MatrixXcd abel;
  // contour_moments(l, k) = contour integral over A_l of omega_l(z) times
  // the integral of omega_k from d_0 to z, continued inside U.
  Eigen::MatrixXcd contour_moments;
  // Filled in by compute_shift().
  Eigen::VectorXcd riemann_constants;
  Eigen::VectorXcd shift;
};

// omega_coeffs and B from the A-periods and the d_0 -> d_j paths. Throws
// kSingularPeriodMatrix.
struct PeriodData {
  Eigen::MatrixXcd a_periods;
  Eigen::MatrixXcd omega_coeffs;
  Eigen::MatrixXcd period_matrix;
  Eigen::MatrixXcd abel;
};
PeriodData period_matrix(const std::vector<HarmonicField>& fields);

// Everything above for one domain. Requires genus >= 1.
SurfaceData surface_data(const std::vector<HarmonicField>& fields);

// Integral of omega (the g normalised differentials) from d_0 to z inside U.
Eigen::VectorXcd abel_map(const std::vector<HarmonicField>& fields,
                          const Eigen::MatrixXcd& omega_coeffs, Point z);

}  // namespace dimerhole
