#include "dimerhole/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Point closest_on_segment(Point a, Point b, Point p) {
  const Point d = b - a;
  const double len2 = d.x * d.x + d.y * d.y;
  if (len2 == 0.0) return a;
  double t = ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + t * d;
}

bool polygon_contains(const RectilinearPolygon& poly, Point p) {
  bool inside = false;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) /
                                    (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

double norm(Point p) { return std::hypot(p.x, p.y); }

RectilinearPolygon RectilinearPolygon::rectangle(double xmin, double ymin,
                                                 double xmax, double ymax) {
  return RectilinearPolygon{
      {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}}};
}

Box bounding_box(const Shape& shape) {
  return std::visit(
      Overloaded{
          [](const Circle& c) {
            return Box{c.center.x - c.radius, c.center.y - c.radius,
                       c.center.x + c.radius, c.center.y + c.radius};
          },
          [](const RectilinearPolygon& poly) {
            Box b{std::numeric_limits<double>::max(),
                  std::numeric_limits<double>::max(),
                  std::numeric_limits<double>::lowest(),
                  std::numeric_limits<double>::lowest()};
            for (const Point& v : poly.vertices) {
              b.xmin = std::min(b.xmin, v.x);
              b.ymin = std::min(b.ymin, v.y);
              b.xmax = std::max(b.xmax, v.x);
              b.ymax = std::max(b.ymax, v.y);
            }
            return b;
          }},
      shape);
}

bool shape_contains(const Shape& shape, Point p) {
  return std::visit(
      Overloaded{[&](const Circle& c) { return norm(p - c.center) < c.radius; },
                 [&](const RectilinearPolygon& poly) {
                   return polygon_contains(poly, p);
                 }},
      shape);
}

Point nearest_boundary_point(const Shape& shape, Point p) {
  return std::visit(
      Overloaded{
          [&](const Circle& c) {
            const Point d = p - c.center;
            const double r = norm(d);
            if (r == 0.0) return c.center + Point{c.radius, 0.0};
            return c.center + (c.radius / r) * d;
          },
          [&](const RectilinearPolygon& poly) {
            const auto& v = poly.vertices;
            Point best = v.front();
            double best_d = std::numeric_limits<double>::max();
            for (std::size_t i = 0; i < v.size(); ++i) {
              const Point q =
                  closest_on_segment(v[i], v[(i + 1) % v.size()], p);
              const double d = norm(q - p);
              if (d < best_d) {
                best_d = d;
                best = q;
              }
            }
            return best;
          }},
      shape);
}

double distance_to_boundary(const Shape& shape, Point p) {
  return norm(nearest_boundary_point(shape, p) - p);
}

std::optional<double> first_crossing(const Shape& shape, Point from,
                                     Point to) {
  const Point d = to - from;
  return std::visit(
      Overloaded{
          [&](const Circle& c) -> std::optional<double> {
            const Point f = from - c.center;
            const double a = d.x * d.x + d.y * d.y;
            const double b = 2.0 * (f.x * d.x + f.y * d.y);
            const double cc = f.x * f.x + f.y * f.y - c.radius * c.radius;
            const double disc = b * b - 4.0 * a * cc;
            if (disc < 0.0 || a == 0.0) return std::nullopt;
            const double sq = std::sqrt(disc);
            const double t0 = (-b - sq) / (2.0 * a);
            const double t1 = (-b + sq) / (2.0 * a);
            for (double t : {t0, t1}) {
              if (t > 1e-14 && t <= 1.0 + 1e-14) return std::min(t, 1.0);
            }
            return std::nullopt;
          },
          [&](const RectilinearPolygon& poly) -> std::optional<double> {
            const auto& v = poly.vertices;
            double best = std::numeric_limits<double>::max();
            for (std::size_t i = 0; i < v.size(); ++i) {
              const Point a = v[i];
              const Point e = v[(i + 1) % v.size()] - a;
              const double den = d.x * e.y - d.y * e.x;
              if (std::abs(den) < 1e-300) continue;
              const Point w = a - from;
              const double t = (w.x * e.y - w.y * e.x) / den;
              const double s = (w.x * d.y - w.y * d.x) / den;
              if (t > 1e-14 && t <= 1.0 + 1e-14 && s >= -1e-14 &&
                  s <= 1.0 + 1e-14) {
                best = std::min(best, t);
              }
            }
            if (best == std::numeric_limits<double>::max()) return std::nullopt;
            return std::min(best, 1.0);
          }},
      shape);
}

bool DomainSpec::contains(Point p, double tol) const {
  if (!shape_contains(outer, p) || distance_to_boundary(outer, p) <= tol) {
    return false;
  }
  for (const Shape& hole : holes) {
    if (shape_contains(hole, p) || distance_to_boundary(hole, p) <= tol) {
      return false;
    }
  }
  return true;
}

int DomainSpec::nearest_component(Point p) const {
  int best = 0;
  double best_d = distance_to_boundary(outer, p);
  for (std::size_t j = 0; j < holes.size(); ++j) {
    const double d = distance_to_boundary(holes[j], p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j) + 1;
    }
  }
  return best;
}

Box DomainSpec::bounding_box() const { return dimerhole::bounding_box(outer); }

void DomainSpec::check() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInfeasibleGeometry, msg);
  };
  if (const auto* poly = std::get_if<RectilinearPolygon>(&outer)) {
    if (poly->vertices.size() < 4) fail("outer polygon needs >= 4 vertices");
  }
  for (std::size_t j = 0; j < holes.size(); ++j) {
    const Box hb = dimerhole::bounding_box(holes[j]);
    std::vector<Point> probes;
    if (const auto* c = std::get_if<Circle>(&holes[j])) {
      for (int q = 0; q < 16; ++q) {
        const double a = q * (3.14159265358979323846 / 8.0);
        probes.push_back(c->center +
                         c->radius * Point{std::cos(a), std::sin(a)});
      }
    } else {
      probes = std::get<RectilinearPolygon>(holes[j]).vertices;
    }
    for (Point probe : probes) {
      if (!shape_contains(outer, probe) ||
          distance_to_boundary(outer, probe) < 1e-12) {
        std::ostringstream os;
        os << "hole " << j + 1 << " is not strictly inside the outer boundary";
        fail(os.str());
      }
    }
    for (std::size_t k = j + 1; k < holes.size(); ++k) {
      const Box kb = dimerhole::bounding_box(holes[k]);
      const bool overlap = hb.xmin <= kb.xmax && kb.xmin <= hb.xmax &&
                           hb.ymin <= kb.ymax && kb.ymin <= hb.ymax;
      if (overlap) {
        std::ostringstream os;
        os << "holes " << j + 1 << " and " << k + 1 << " are not disjoint";
        fail(os.str());
      }
    }
  }
  if (marked_points.size() != holes.size() + 1) {
    std::ostringstream os;
    os << "expected " << holes.size() + 1 << " marked points, got "
       << marked_points.size();
    fail(os.str());
  }
  const Box ob = bounding_box();
  const double tol = 1e-9 * std::max(ob.xmax - ob.xmin, ob.ymax - ob.ymin);
  for (std::size_t j = 0; j < marked_points.size(); ++j) {
    const Shape& comp = j == 0 ? outer : holes[j - 1];
    if (distance_to_boundary(comp, marked_points[j]) > tol) {
      std::ostringstream os;
      os << "marked point " << j << " is not on boundary component " << j;
      fail(os.str());
    }
  }
}

}  // namespace dimerhole
