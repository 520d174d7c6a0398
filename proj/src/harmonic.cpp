#include "dimerhole/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

constexpr int kDi[4] = {1, 0, -1, 0};
constexpr int kDj[4] = {0, 1, 0, -1};

const Shape& component_shape(const DomainSpec& spec, int c) {
  return c == 0 ? spec.outer : spec.holes[c - 1];
}

double boundary_distance(const DomainSpec& spec, Point p) {
  double d = distance_to_boundary(spec.outer, p);
  for (const Shape& s : spec.holes) d = std::min(d, distance_to_boundary(s, p));
  return d;
}

std::vector<Point> boundary_samples(const Shape& shape, double spacing) {
  std::vector<Point> out;
  if (const auto* c = std::get_if<Circle>(&shape)) {
    const int n = std::max(64, static_cast<int>(2 * std::numbers::pi *
                                                c->radius / spacing));
    for (int q = 0; q < n; ++q) {
      const double a = 2 * std::numbers::pi * q / n;
      out.push_back(c->center + c->radius * Point{std::cos(a), std::sin(a)});
    }
  } else {
    const auto& v = std::get<RectilinearPolygon>(shape).vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point a = v[k], b = v[(k + 1) % v.size()];
      const int n = std::max(1, static_cast<int>(norm(b - a) / spacing));
      for (int q = 0; q < n; ++q) out.push_back(a + (double(q) / n) * (b - a));
    }
  }
  return out;
}

void check_resolution(const DomainSpec& spec, double h) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kMeshTooCoarse, what);
  };
  for (int j = 1; j <= spec.genus(); ++j) {
    const Box b = bounding_box(spec.holes[j - 1]);
    if (std::min(b.xmax - b.xmin, b.ymax - b.ymin) < 8 * h) {
      std::ostringstream os;
      os << "hole " << j << " spans fewer than 8 mesh cells";
      fail(os.str());
    }
    for (Point p : boundary_samples(spec.holes[j - 1], h)) {
      double gap = distance_to_boundary(spec.outer, p);
      for (int k = 1; k <= spec.genus(); ++k) {
        if (k != j) gap = std::min(gap, distance_to_boundary(spec.holes[k - 1], p));
      }
      if (gap < 8 * h) {
        std::ostringstream os;
        os << "gap next to hole " << j << " spans fewer than 8 mesh cells";
        fail(os.str());
      }
    }
  }
}

Point rotate_step(Point g, Point d) {
  // (df, *df) along step d for gradient g.
  return {g.x * d.x + g.y * d.y, -g.y * d.x + g.x * d.y};
}

}  // namespace

bool MeshGeometry::full_cell(int i, int j) const {
  const int u00 = unknown_at(i, j), u10 = unknown_at(i + 1, j);
  const int u01 = unknown_at(i, j + 1), u11 = unknown_at(i + 1, j + 1);
  if (u00 < 0 || u10 < 0 || u01 < 0 || u11 < 0) return false;
  return arms[u00][0].neighbour == u10 && arms[u00][1].neighbour == u01 &&
         arms[u10][1].neighbour == u11 && arms[u01][0].neighbour == u11;
}

double LocalFit::value(Point p) const {
  const double sx = (p.x - center.x) / h, sy = (p.y - center.y) / h;
  return coef[0] + coef[1] * sx + coef[2] * sy + coef[3] * sx * sx +
         coef[4] * sx * sy + coef[5] * sy * sy;
}

Point LocalFit::gradient(Point p) const {
  const double sx = (p.x - center.x) / h, sy = (p.y - center.y) / h;
  return {(coef[1] + 2 * coef[3] * sx + coef[4] * sy) / h,
          (coef[2] + coef[4] * sx + 2 * coef[5] * sy) / h};
}

HarmonicField::HarmonicField(std::shared_ptr<const MeshGeometry> mesh,
                             std::vector<double> values, BoundaryData boundary)
    : mesh_(std::move(mesh)),
      values_(std::move(values)),
      boundary_(std::move(boundary)) {}

double HarmonicField::arm_value(int u, int d) const {
  const auto& arm = mesh_->arms[u][d];
  return arm.neighbour >= 0 ? values_[arm.neighbour]
                            : boundary_(arm.component, arm.end);
}

Point HarmonicField::node_gradient(int u) const {
  const auto& a = mesh_->arms[u];
  const double u0 = values_[u];
  auto deriv = [&](int fwd, int back) {
    const double p = a[fwd].length * mesh_->h, q = a[back].length * mesh_->h;
    return (q * q * (arm_value(u, fwd) - u0) + p * p * (u0 - arm_value(u, back))) /
           (p * q * (p + q));
  };
  return {deriv(0, 2), deriv(1, 3)};
}

LocalFit HarmonicField::fit_near(Point p) const {
  const MeshGeometry& m = *mesh_;
  const int ci = static_cast<int>(std::floor((p.x - m.x0) / m.h));
  const int cj = static_cast<int>(std::floor((p.y - m.y0) / m.h));
  std::vector<std::pair<Point, double>> pts;
  for (int jj = cj - 1; jj <= cj + 2; ++jj) {
    for (int ii = ci - 1; ii <= ci + 2; ++ii) {
      const int u = m.unknown_at(ii, jj);
      if (u < 0) continue;
      pts.emplace_back(m.position(u), values_[u]);
      for (const auto& arm : m.arms[u]) {
        if (arm.neighbour < 0) {
          pts.emplace_back(arm.end, boundary_(arm.component, arm.end));
        }
      }
    }
  }
  LocalFit fit;
  fit.center = p;
  fit.h = m.h;
  if (pts.empty()) {
    throw Error(ErrorCode::kPathLeavesDomain, "no mesh data near point");
  }
  const int ncoef = pts.size() >= 8 ? 6 : (pts.size() >= 3 ? 3 : 1);
  Eigen::MatrixXd a(pts.size(), ncoef);
  Eigen::VectorXd rhs(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double sx = (pts[k].first.x - p.x) / m.h;
    const double sy = (pts[k].first.y - p.y) / m.h;
    const double w = 1.0 / std::sqrt(sx * sx + sy * sy + 0.25);
    const double basis[6] = {1, sx, sy, sx * sx, sx * sy, sy * sy};
    for (int c = 0; c < ncoef; ++c) a(k, c) = w * basis[c];
    rhs[k] = w * pts[k].second;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
  for (int k = 0; k < ncoef; ++k) fit.coef[k] = c[k];
  return fit;
}

double HarmonicField::value(Point p) const {
  const MeshGeometry& m = *mesh_;
  if (!m.spec.contains(p)) {
    throw Error(ErrorCode::kPathLeavesDomain, "evaluation point outside domain");
  }
  const double fx = (p.x - m.x0) / m.h, fy = (p.y - m.y0) / m.h;
  const int ci = static_cast<int>(std::floor(fx));
  const int cj = static_cast<int>(std::floor(fy));
  if (m.full_cell(ci, cj)) {
    const double tx = fx - ci, ty = fy - cj;
    return (1 - tx) * (1 - ty) * values_[m.unknown_at(ci, cj)] +
           tx * (1 - ty) * values_[m.unknown_at(ci + 1, cj)] +
           (1 - tx) * ty * values_[m.unknown_at(ci, cj + 1)] +
           tx * ty * values_[m.unknown_at(ci + 1, cj + 1)];
  }
  return fit_near(p).value(p);
}

Point HarmonicField::gradient(Point p) const {
  const MeshGeometry& m = *mesh_;
  if (!m.spec.contains(p)) {
    throw Error(ErrorCode::kPathLeavesDomain, "evaluation point outside domain");
  }
  const double fx = (p.x - m.x0) / m.h, fy = (p.y - m.y0) / m.h;
  const int ci = static_cast<int>(std::floor(fx));
  const int cj = static_cast<int>(std::floor(fy));
  if (m.full_cell(ci, cj)) {
    const double tx = fx - ci, ty = fy - cj;
    const Point g00 = node_gradient(m.unknown_at(ci, cj));
    const Point g10 = node_gradient(m.unknown_at(ci + 1, cj));
    const Point g01 = node_gradient(m.unknown_at(ci, cj + 1));
    const Point g11 = node_gradient(m.unknown_at(ci + 1, cj + 1));
    return (1 - tx) * (1 - ty) * g00 + tx * (1 - ty) * g10 +
           (1 - tx) * ty * g01 + tx * ty * g11;
  }
  return fit_near(p).gradient(p);
}

double HarmonicField::value_or_boundary(Point p) const {
  const DomainSpec& spec = mesh_->spec;
  if (spec.contains(p)) return value(p);
  const int c = spec.nearest_component(p);
  if (distance_to_boundary(component_shape(spec, c), p) > 1e-9) {
    throw Error(ErrorCode::kPathLeavesDomain, "point outside domain");
  }
  return boundary_(c, p);
}

double HarmonicField::max_residual() const {
  double worst = 0.0;
  for (int u = 0; u < mesh_->size(); ++u) {
    const auto& a = mesh_->arms[u];
    double r = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const int f = axis, b = axis + 2;
      const double p = a[f].length, q = a[b].length;
      r += 2.0 / (p * (p + q)) * (arm_value(u, f) - values_[u]) +
           2.0 / (q * (p + q)) * (arm_value(u, b) - values_[u]);
    }
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double HarmonicField::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double HarmonicField::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

double GreensFunction::operator()(Point z) const {
  const double r = norm(z - source_);
  if (r < 1e-14) {
    throw Error(ErrorCode::kCoincidentPoints, "Green's function at its source");
  }
  const DomainSpec& spec = regular_.mesh().spec;
  if (!spec.contains(z)) {
    if (boundary_distance(spec, z) <= 1e-9) return 0.0;
    throw Error(ErrorCode::kPathLeavesDomain, "point outside domain");
  }
  return regular_.value(z) - std::log(r) / (2 * std::numbers::pi);
}

struct HarmonicSolver::Factor {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

HarmonicSolver::~HarmonicSolver() = default;

HarmonicSolver::HarmonicSolver(const DomainSpec& spec, double h)
    : mesh_(std::make_shared<MeshGeometry>()), factor_(std::make_unique<Factor>()) {
  spec.check();
  if (!(h > 0.0)) throw Error(ErrorCode::kMeshTooCoarse, "mesh size must be positive");
  check_resolution(spec, h);
  MeshGeometry& m = *mesh_;
  m.spec = spec;
  m.h = h;
  const Box box = spec.bounding_box();
  m.x0 = box.xmin;
  m.y0 = box.ymin;
  m.nx = static_cast<int>(std::ceil((box.xmax - box.xmin) / h - 1e-9)) + 1;
  m.ny = static_cast<int>(std::ceil((box.ymax - box.ymin) / h - 1e-9)) + 1;
  m.unknown.assign(static_cast<std::size_t>(m.nx) * m.ny, -1);
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      const Point p = m.node_position(i, j);
      // Nodes almost on the boundary are pinned to the boundary data instead.
      if (spec.contains(p) && boundary_distance(spec, p) > 1e-3 * h) {
        m.unknown[j * m.nx + i] = static_cast<int>(m.node_of.size());
        m.node_of.push_back(j * m.nx + i);
      }
    }
  }
  const int n = m.size();
  m.arms.resize(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const int i = m.node_of[u] % m.nx, j = m.node_of[u] / m.nx;
    const Point p = m.node_position(i, j);
    for (int d = 0; d < 4; ++d) {
      const Point q = m.node_position(i + kDi[d], j + kDj[d]);
      double t = 2.0;
      int comp = -1;
      for (int c = 0; c <= spec.genus(); ++c) {
        if (auto tc = first_crossing(component_shape(spec, c), p, q);
            tc && *tc < t) {
          t = *tc;
          comp = c;
        }
      }
      auto& arm = m.arms[u][d];
      const int nb = m.unknown_at(i + kDi[d], j + kDj[d]);
      if (comp >= 0 && t < 1.0 - 1e-12) {
        arm = {t, -1, comp, p + t * (q - p)};
      } else if (nb >= 0) {
        arm = {1.0, nb, -1, q};
      } else {
        arm = {1.0, -1, comp >= 0 ? comp : spec.nearest_component(q), q};
      }
    }
    double diag = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const auto& f = m.arms[u][axis];
      const auto& b = m.arms[u][axis + 2];
      const double cf = 2.0 / (f.length * (f.length + b.length));
      const double cb = 2.0 / (b.length * (f.length + b.length));
      diag -= cf + cb;
      if (f.neighbour >= 0) trips.emplace_back(u, f.neighbour, cf);
      if (b.neighbour >= 0) trips.emplace_back(u, b.neighbour, cb);
    }
    trips.emplace_back(u, u, diag);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  factor_->lu.analyzePattern(a);
  factor_->lu.factorize(a);
  if (factor_->lu.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolverDiverged, "sparse factorisation failed");
  }
}

HarmonicField HarmonicSolver::solve(HarmonicField::BoundaryData boundary) const {
  const MeshGeometry& m = *mesh_;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.size());
  for (int u = 0; u < m.size(); ++u) {
    for (int axis = 0; axis < 2; ++axis) {
      const auto& f = m.arms[u][axis];
      const auto& b = m.arms[u][axis + 2];
      if (f.neighbour < 0) {
        rhs[u] -= 2.0 / (f.length * (f.length + b.length)) *
                  boundary(f.component, f.end);
      }
      if (b.neighbour < 0) {
        rhs[u] -= 2.0 / (b.length * (f.length + b.length)) *
                  boundary(b.component, b.end);
      }
    }
  }
  const Eigen::VectorXd x = factor_->lu.solve(rhs);
  if (factor_->lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorCode::kSolverDiverged, "sparse solve failed");
  }
  HarmonicField field(mesh_, std::vector<double>(x.data(), x.data() + x.size()),
                      std::move(boundary));
  if (field.max_residual() > 1e-8) {
    throw Error(ErrorCode::kSolverDiverged, "residual above tolerance");
  }
  return field;
}

HarmonicField HarmonicSolver::harmonic_measure(int j) const {
  if (j < 1 || j > spec().genus()) {
    throw Error(ErrorCode::kMissingHarmonicData, "no such hole");
  }
  return solve([j](int c, Point) { return c == j ? 1.0 : 0.0; });
}

std::vector<HarmonicField> HarmonicSolver::harmonic_measures() const {
  std::vector<HarmonicField> out;
  for (int j = 1; j <= spec().genus(); ++j) out.push_back(harmonic_measure(j));
  return out;
}

GreensFunction HarmonicSolver::greens_function(Point source) const {
  if (!spec().contains(source) ||
      boundary_distance(spec(), source) < 4 * mesh_->h) {
    throw Error(ErrorCode::kSourceTooCloseToBoundary,
                "source within 4 mesh cells of the boundary");
  }
  auto field = solve([source](int, Point p) {
    return std::log(norm(p - source)) / (2 * std::numbers::pi);
  });
  return GreensFunction(std::move(field), source);
}

Eigen::MatrixXd scale_matrix(const std::vector<HarmonicField>& fields) {
  const int g = static_cast<int>(fields.size());
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(g, g);
  if (g == 0) return tau;
  for (const auto& f : fields) {
    if (!f.same_mesh(fields[0])) {
      throw Error(ErrorCode::kMismatchedMeshes, "fields live on different meshes");
    }
  }
  const MeshGeometry& m = fields[0].mesh();
  const double h = m.h;
  constexpr int kSub = 8;
  std::vector<Point> grad(g);
  std::vector<LocalFit> fits(g);
  for (int cj = 0; cj + 1 < m.ny; ++cj) {
    for (int ci = 0; ci + 1 < m.nx; ++ci) {
      if (m.full_cell(ci, cj)) {
        const int u00 = m.unknown_at(ci, cj), u10 = m.unknown_at(ci + 1, cj);
        const int u01 = m.unknown_at(ci, cj + 1), u11 = m.unknown_at(ci + 1, cj + 1);
        for (int k = 0; k < g; ++k) {
          const auto& v = fields[k].values();
          grad[k] = {(v[u10] - v[u00] + v[u11] - v[u01]) / (2 * h),
                     (v[u01] - v[u00] + v[u11] - v[u10]) / (2 * h)};
        }
        for (int a = 0; a < g; ++a) {
          for (int b = a; b < g; ++b) {
            tau(a, b) += h * h * (grad[a].x * grad[b].x + grad[a].y * grad[b].y);
          }
        }
        continue;
      }
      if (m.unknown_at(ci, cj) < 0 && m.unknown_at(ci + 1, cj) < 0 &&
          m.unknown_at(ci, cj + 1) < 0 && m.unknown_at(ci + 1, cj + 1) < 0) {
        continue;
      }
      const Point center = m.node_position(ci, cj) + Point{h / 2, h / 2};
      for (int k = 0; k < g; ++k) fits[k] = fields[k].fit_near(center);
      for (int sb = 0; sb < kSub; ++sb) {
        for (int sa = 0; sa < kSub; ++sa) {
          const Point p = m.node_position(ci, cj) +
                          Point{(sa + 0.5) * h / kSub, (sb + 0.5) * h / kSub};
          if (!m.spec.contains(p)) continue;
          for (int k = 0; k < g; ++k) grad[k] = fits[k].gradient(p);
          for (int a = 0; a < g; ++a) {
            for (int b = a; b < g; ++b) {
              tau(a, b) += h * h / (kSub * kSub) *
                           (grad[a].x * grad[b].x + grad[a].y * grad[b].y);
            }
          }
        }
      }
    }
  }
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < a; ++b) tau(a, b) = tau(b, a);
  }
  return 0.5 * tau;
}

namespace {

// Index k with c == origin + (k + 1/2) h, if c sits on a dual grid line.
std::optional<int> dual_index(double c, double origin, double h) {
  const double k = (c - origin) / h - 0.5;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-9) return std::nullopt;
  return static_cast<int>(r);
}

// Integral of the conjugate differential along a segment joining two cell
// centres on a dual grid line, as a sum of discrete fluxes u(nb) - u across
// the primal edges it crosses. Sums over closed dual loops telescope into
// discrete Laplacians, so they vanish to solver precision. Returns nothing
// when the segment is not of that form or passes a cut stencil.
std::optional<double> dual_flux(const HarmonicField& f, Point a, Point b) {
  const MeshGeometry& m = f.mesh();
  const auto ax = dual_index(a.x, m.x0, m.h), ay = dual_index(a.y, m.y0, m.h);
  const auto bx = dual_index(b.x, m.x0, m.h), by = dual_index(b.y, m.y0, m.h);
  if (!ax || !ay || !bx || !by) return std::nullopt;
  const auto& v = f.values();
  double sum = 0.0;
  if (*ay == *by) {
    const int j = *ay, step = *bx > *ax ? 1 : -1;
    for (int i = std::min(*ax, *bx) + 1; i <= std::max(*ax, *bx); ++i) {
      const int lo = m.unknown_at(i, j), hi = m.unknown_at(i, j + 1);
      if (lo < 0 || hi < 0 || m.arms[lo][1].neighbour != hi) return std::nullopt;
      sum -= step * (v[hi] - v[lo]);
    }
    return sum;
  }
  if (*ax == *bx) {
    const int i = *ax, step = *by > *ay ? 1 : -1;
    for (int j = std::min(*ay, *by) + 1; j <= std::max(*ay, *by); ++j) {
      const int lo = m.unknown_at(i, j), hi = m.unknown_at(i + 1, j);
      if (lo < 0 || hi < 0 || m.arms[lo][0].neighbour != hi) return std::nullopt;
      sum += step * (v[hi] - v[lo]);
    }
    return sum;
  }
  return std::nullopt;
}

}  // namespace

std::complex<double> complex_measure_path(const HarmonicField& field,
                                          const Polyline& path) {
  if (path.size() < 2) return 0.0;
  const double h = field.mesh().h;
  const double re = field.value_or_boundary(path.back()) -
                    field.value_or_boundary(path.front());
  double im = 0.0;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    if (auto flux = dual_flux(field, path[s], path[s + 1])) {
      im += *flux;
      continue;
    }
    const Point a = path[s], d = path[s + 1] - path[s];
    const int n = std::max(1, static_cast<int>(std::ceil(norm(d) / (0.5 * h))));
    for (int k = 0; k < n; ++k) {
      const Point mid = a + ((k + 0.5) / n) * d;
      im += rotate_step(field.gradient(mid), (1.0 / n) * d).y;
    }
  }
  return {re, im};
}

Polyline hole_contour(const MeshGeometry& mesh, int j, int cells) {
  const Box b = bounding_box(mesh.spec.holes.at(j - 1));
  const double h = mesh.h;
  // Corners at cell centres, so the sides run along dual grid lines.
  const double xl = mesh.x0 + (std::floor((b.xmin - mesh.x0) / h) - cells - 0.5) * h;
  const double xr = mesh.x0 + (std::ceil((b.xmax - mesh.x0) / h) + cells + 0.5) * h;
  const double yl = mesh.y0 + (std::floor((b.ymin - mesh.y0) / h) - cells - 0.5) * h;
  const double yr = mesh.y0 + (std::ceil((b.ymax - mesh.y0) / h) + cells + 0.5) * h;
  return {{xl, yl}, {xr, yl}, {xr, yr}, {xl, yr}, {xl, yl}};
}

Polyline interior_path(const MeshGeometry& mesh, Point from, Point to) {
  // Walk over full cells whose corners keep two cells of clearance; the
  // path joins cell centres along dual grid lines.
  const int n = mesh.size();
  std::vector<char> clear(n, 0);
  for (int u = 0; u < n; ++u) {
    clear[u] = boundary_distance(mesh.spec, mesh.position(u)) >= 2 * mesh.h;
  }
  const int cw = mesh.nx - 1, ch = mesh.ny - 1;
  std::vector<char> ok(static_cast<std::size_t>(cw) * ch, 0);
  for (int j = 0; j < ch; ++j) {
    for (int i = 0; i < cw; ++i) {
      ok[j * cw + i] = mesh.full_cell(i, j) && clear[mesh.unknown_at(i, j)] &&
                       clear[mesh.unknown_at(i + 1, j)] &&
                       clear[mesh.unknown_at(i, j + 1)] &&
                       clear[mesh.unknown_at(i + 1, j + 1)];
    }
  }
  auto centre = [&](int c) {
    return mesh.node_position(c % cw, c / cw) + Point{0.5 * mesh.h, 0.5 * mesh.h};
  };
  auto nearest = [&](Point p) {
    int best = -1;
    double bd = std::numeric_limits<double>::max();
    for (int c = 0; c < cw * ch; ++c) {
      if (!ok[c]) continue;
      const double d = norm(centre(c) - p);
      if (d < bd - 1e-12) {
        bd = d;
        best = c;
      }
    }
    if (best < 0) throw Error(ErrorCode::kPathLeavesDomain, "no interior cells");
    return best;
  };
  const int s = nearest(from), t = nearest(to);
  std::vector<int> prev(ok.size(), -2);
  std::deque<int> queue{s};
  prev[s] = -1;
  while (!queue.empty() && prev[t] == -2) {
    const int c = queue.front();
    queue.pop_front();
    const int ci = c % cw, cj = c / cw;
    for (int d = 0; d < 4; ++d) {
      const int ni = ci + kDi[d], nj = cj + kDj[d];
      if (ni < 0 || nj < 0 || ni >= cw || nj >= ch) continue;
      const int nc = nj * cw + ni;
      if (ok[nc] && prev[nc] == -2) {
        prev[nc] = c;
        queue.push_back(nc);
      }
    }
  }
  if (prev[t] == -2) {
    throw Error(ErrorCode::kPathLeavesDomain, "endpoints not connected inside U");
  }
  std::vector<Point> nodes;
  for (int c = t; c != -1; c = prev[c]) nodes.push_back(centre(c));
  std::reverse(nodes.begin(), nodes.end());
  Polyline out{from};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    // Keep only the corners of the staircase.
    if (k > 0 && k + 1 < nodes.size()) {
      const Point d1 = nodes[k] - nodes[k - 1], d2 = nodes[k + 1] - nodes[k];
      if (std::abs(d1.x * d2.y - d1.y * d2.x) < 1e-12 * mesh.h * mesh.h) continue;
    }
    if (norm(nodes[k] - out.back()) > 1e-12) out.push_back(nodes[k]);
  }
  if (norm(to - out.back()) > 1e-12) out.push_back(to);
  return out;
}

PeriodData period_matrix(const std::vector<HarmonicField>& fields) {
  const int g = static_cast<int>(fields.size());
  if (g == 0) {
    throw Error(ErrorCode::kSingularPeriodMatrix, "genus 0 has no periods");
  }
  for (const auto& f : fields) {
    if (!f.same_mesh(fields[0])) {
      throw Error(ErrorCode::kMismatchedMeshes, "fields live on different meshes");
    }
  }
  const MeshGeometry& m = fields[0].mesh();
  PeriodData out;
  out.a_periods.resize(g, g);
  for (int i = 0; i < g; ++i) {
    const Polyline loop = hole_contour(m, i + 1);
    for (int l = 0; l < g; ++l) {
      out.a_periods(i, l) = complex_measure_path(fields[l], loop);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(out.a_periods);
  if (lu.rank() < g || lu.rcond() < 1e-12) {
    throw Error(ErrorCode::kSingularPeriodMatrix, "A-period matrix is singular");
  }
  out.omega_coeffs = lu.inverse();
  Eigen::MatrixXcd inc(g, g);
  for (int j = 0; j < g; ++j) {
    const Polyline path =
        interior_path(m, m.spec.marked_points.at(0), m.spec.marked_points.at(j + 1));
    for (int l = 0; l < g; ++l) inc(j, l) = complex_measure_path(fields[l], path);
  }
  out.abel = inc * out.omega_coeffs;
  // The B-cycle runs d_0 -> d_i inside U and back through the mirror copy,
  // where the differentials are the conjugates.
  out.period_matrix = out.abel - out.abel.conjugate();
  return out;
}

Eigen::VectorXcd abel_map(const std::vector<HarmonicField>& fields,
                          const Eigen::MatrixXcd& omega_coeffs, Point z) {
  const int g = static_cast<int>(fields.size());
  const MeshGeometry& m = fields.at(0).mesh();
  const Polyline path = interior_path(m, m.spec.marked_points.at(0), z);
  Eigen::VectorXcd inc(g);
  for (int l = 0; l < g; ++l) inc[l] = complex_measure_path(fields[l], path);
  return omega_coeffs.transpose() * inc;
}

SurfaceData surface_data(const std::vector<HarmonicField>& fields) {
  const int g = static_cast<int>(fields.size());
  SurfaceData s;
  s.genus = g;
  s.tau = scale_matrix(fields);
  PeriodData p = period_matrix(fields);
  s.a_periods = p.a_periods;
  s.omega_coeffs = p.omega_coeffs;
  s.period_matrix = p.period_matrix;
  s.abel = p.abel;
  const MeshGeometry& m = fields[0].mesh();
  const double h = m.h;
  s.contour_moments = Eigen::MatrixXcd::Zero(g, g);
  for (int l = 0; l < g; ++l) {
    const Polyline loop = hole_contour(m, l + 1);
    Eigen::VectorXcd a = abel_map(fields, s.omega_coeffs, loop.front());
    for (std::size_t q = 0; q + 1 < loop.size(); ++q) {
      const Point d = loop[q + 1] - loop[q];
      const int n = std::max(1, static_cast<int>(std::ceil(norm(d) / (0.5 * h))));
      for (int k = 0; k < n; ++k) {
        const Point mid = loop[q] + ((k + 0.5) / n) * d;
        Eigen::VectorXcd dw(g);
        for (int r = 0; r < g; ++r) {
          const Point w = rotate_step(fields[r].gradient(mid), (1.0 / n) * d);
          dw[r] = {w.x, w.y};
        }
        const Eigen::VectorXcd om = s.omega_coeffs.transpose() * dw;
        for (int kk = 0; kk < g; ++kk) {
          s.contour_moments(l, kk) += om[l] * (a[kk] + 0.5 * om[kk]);
        }
        a += om;
      }
    }
  }
  return s;
}

}  // namespace dimerhole
