#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dimerhole {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

double norm(Point p);

struct Box {
  double xmin, ymin, xmax, ymax;
};

struct Circle {
  Point center;
  double radius = 1.0;
};

// Axis-aligned simple polygon given by its vertices in order (either
// orientation). Consecutive vertices must differ in exactly one coordinate.
struct RectilinearPolygon {
  std::vector<Point> vertices;

  static RectilinearPolygon rectangle(double xmin, double ymin, double xmax,
                                      double ymax);
};

using Shape = std::variant<RectilinearPolygon, Circle>;

Box bounding_box(const Shape& shape);
bool shape_contains(const Shape& shape, Point p);
double distance_to_boundary(const Shape& shape, Point p);
Point nearest_boundary_point(const Shape& shape, Point p);

// Distance along the segment from `from` to `to` (as a fraction in (0, 1]) at
// which it first meets the boundary of `shape`, if it does.
std::optional<double> first_crossing(const Shape& shape, Point from, Point to);

// A bounded planar domain: the outer shape minus g disjoint holes, with one
// marked point on each boundary component (index 0 on the outer boundary).
struct DomainSpec {
  Shape outer;
  std::vector<Shape> holes;
  std::vector<Point> marked_points;

  int genus() const { return static_cast<int>(holes.size()); }

  // Strictly inside: points within `tol` of a boundary component are not.
  bool contains(Point p, double tol = 1e-12) const;

  // Index of the nearest boundary component (0 = outer, j = hole j).
  int nearest_component(Point p) const;

  Box bounding_box() const;

  // Throws Error(kInfeasibleGeometry) describing the first violated
  // invariant: holes disjoint and inside the outer shape, one marked point
  // per component lying on it.
  void check() const;
};

}  // namespace dimerhole
