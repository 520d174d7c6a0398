#include "dimerhole/region.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

constexpr std::array<std::array<int, 2>, 4> kSides = {
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

LatticeSquare shifted(LatticeSquare s, int di, int dj) {
  return {s.i + di, s.j + dj};
}

bool is_black(LatticeSquare s) { return !is_white(s); }

// Square on the right of the directed boundary edge v -> v + d.
LatticeSquare right_of(LatticeVertex v, int dx, int dy) {
  const int cx = 2 * v.a + dx + dy;
  const int cy = 2 * v.b + dy - dx;
  // cx and cy are odd, so the halving is exact.
  return {(cx - 1) / 2, (cy - 1) / 2};
}

std::array<LatticeVertex, 4> corners(LatticeSquare s) {
  return {LatticeVertex{s.i, s.j}, LatticeVertex{s.i + 1, s.j},
          LatticeVertex{s.i + 1, s.j + 1}, LatticeVertex{s.i, s.j + 1}};
}

// Connected components (edge adjacency) of a square list.
std::vector<std::vector<LatticeSquare>> components(const SquareSet& set) {
  std::vector<int> label(set.size(), -1);
  std::vector<std::vector<LatticeSquare>> out;
  const auto& sq = set.sorted();
  for (std::size_t start = 0; start < sq.size(); ++start) {
    if (label[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<int> queue{static_cast<int>(start)};
    label[start] = id;
    while (!queue.empty()) {
      const int k = queue.front();
      queue.pop_front();
      out.back().push_back(sq[k]);
      for (const auto& d : kSides) {
        const int n = set.index(shifted(sq[k], d[0], d[1]));
        if (n >= 0 && label[n] < 0) {
          label[n] = id;
          queue.push_back(n);
        }
      }
    }
  }
  return out;
}

bool connected(const std::vector<LatticeSquare>& squares) {
  if (squares.empty()) return false;
  return components(SquareSet(squares)).size() == 1;
}

// Corner squares of a polyomino: convex corners contribute their own square,
// concave corners the region square diagonal to the missing one.
std::vector<LatticeSquare> corner_squares(const SquareSet& set) {
  std::vector<LatticeSquare> out;
  std::map<LatticeVertex, int> seen;
  for (const LatticeSquare& s : set.sorted()) {
    for (const LatticeVertex& v : corners(s)) {
      if (seen.count(v)) continue;
      seen[v] = 1;
      const LatticeSquare around[4] = {
          {v.a - 1, v.b - 1}, {v.a, v.b - 1}, {v.a, v.b}, {v.a - 1, v.b}};
      int inside = 0;
      int missing = -1, present = -1;
      for (int k = 0; k < 4; ++k) {
        if (set.contains(around[k])) {
          ++inside;
          present = k;
        } else {
          missing = k;
        }
      }
      if (inside == 1) out.push_back(around[present]);
      if (inside == 3) out.push_back(around[(missing + 2) % 4]);
    }
  }
  std::sort(out.begin(), out.end(), RowMajorLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string square_str(LatticeSquare s) {
  std::ostringstream os;
  os << "(" << s.i << "," << s.j << ")";
  return os.str();
}

const char* class_name(ColorClass c) {
  switch (c) {
    case ColorClass::kW0: return "W0";
    case ColorClass::kW1: return "W1";
    case ColorClass::kB0: return "B0";
    case ColorClass::kB1: return "B1";
  }
  return "?";
}

}  // namespace

ColorClass color_of(LatticeSquare s) {
  const bool ie = (s.i & 1) == 0;
  const bool je = (s.j & 1) == 0;
  if (ie && je) return ColorClass::kW0;
  if (!ie && !je) return ColorClass::kW1;
  return ie ? ColorClass::kB1 : ColorClass::kB0;
}

char class_letter(ColorClass c) {
  switch (c) {
    case ColorClass::kW0: return 'W';
    case ColorClass::kW1: return 'w';
    case ColorClass::kB0: return 'B';
    case ColorClass::kB1: return 'b';
  }
  return '?';
}

Point square_center(LatticeSquare s, double scale) {
  return {s.i * scale, s.j * scale};
}

Point vertex_position(LatticeVertex v, double scale) {
  return {(v.a - 0.5) * scale, (v.b - 0.5) * scale};
}

long long BoundaryLoop::twice_signed_area() const {
  long long area = 0;
  const std::size_t n = vertices.size();
  for (std::size_t k = 0; k < n; ++k) {
    const LatticeVertex& p = vertices[k];
    const LatticeVertex& q = vertices[(k + 1) % n];
    area += static_cast<long long>(p.a) * q.b - static_cast<long long>(q.a) * p.b;
  }
  return area;
}

SquareSet::SquareSet(const std::vector<LatticeSquare>& squares, int margin)
    : sorted_(squares) {
  std::sort(sorted_.begin(), sorted_.end(), RowMajorLess{});
  sorted_.erase(std::unique(sorted_.begin(), sorted_.end()), sorted_.end());
  if (sorted_.empty()) return;
  int imin = sorted_.front().i, imax = imin;
  for (const auto& s : sorted_) {
    imin = std::min(imin, s.i);
    imax = std::max(imax, s.i);
  }
  i0_ = imin - margin;
  j0_ = sorted_.front().j - margin;
  w_ = imax - imin + 1 + 2 * margin;
  h_ = sorted_.back().j - sorted_.front().j + 1 + 2 * margin;
  grid_.assign(static_cast<std::size_t>(w_) * h_, -1);
  for (std::size_t k = 0; k < sorted_.size(); ++k) {
    const auto& s = sorted_[k];
    grid_[static_cast<std::size_t>(s.j - j0_) * w_ + (s.i - i0_)] =
        static_cast<int>(k);
  }
}

int SquareSet::index(LatticeSquare s) const {
  const int x = s.i - i0_;
  const int y = s.j - j0_;
  if (x < 0 || y < 0 || x >= w_ || y >= h_) return -1;
  return grid_[static_cast<std::size_t>(y) * w_ + x];
}

std::vector<BoundaryLoop> trace_boundary(const SquareSet& set) {
  // Directed boundary edges with the region on the left.
  std::map<LatticeVertex, std::vector<LatticeVertex>> out_edges;
  for (const LatticeSquare& s : set.sorted()) {
    const auto c = corners(s);
    if (!set.contains(shifted(s, 0, -1))) out_edges[c[0]].push_back(c[1]);
    if (!set.contains(shifted(s, 1, 0))) out_edges[c[1]].push_back(c[2]);
    if (!set.contains(shifted(s, 0, 1))) out_edges[c[2]].push_back(c[3]);
    if (!set.contains(shifted(s, -1, 0))) out_edges[c[3]].push_back(c[0]);
  }
  std::map<LatticeVertex, bool> pinch;
  for (const auto& [v, targets] : out_edges) pinch[v] = targets.size() > 1;
  std::vector<BoundaryLoop> loops;
  for (auto& [start, targets] : out_edges) {
    while (!targets.empty()) {
      BoundaryLoop loop;
      std::map<LatticeVertex, int> visits;
      LatticeVertex v = start;
      do {
        loop.vertices.push_back(v);
        if (++visits[v] > 1 || pinch[v]) loop.simple = false;
        auto& outs = out_edges[v];
        const LatticeVertex next = outs.back();
        outs.pop_back();
        v = next;
      } while (!(v == start));
      loops.push_back(std::move(loop));
    }
  }
  if (loops.empty()) return loops;
  // Outer loop: largest positive area. Holes keep their min-vertex order,
  // which the map iteration already provides.
  std::size_t outer = 0;
  for (std::size_t k = 1; k < loops.size(); ++k) {
    if (loops[k].twice_signed_area() > loops[outer].twice_signed_area()) {
      outer = k;
    }
  }
  std::rotate(loops.begin(), loops.begin() + outer, loops.begin() + outer + 1);
  return loops;
}

PolyominoRegion PolyominoRegion::from_squares(std::vector<LatticeSquare> squares,
                                              double scale) {
  PolyominoRegion r;
  r.scale_ = scale;
  r.squares_ = SquareSet(squares);
  r.loops_ = trace_boundary(r.squares_);
  return r;
}

PolyominoRegion PolyominoRegion::temperleyan(
    const std::vector<LatticeSquare>& even, LatticeSquare removed,
    const std::vector<LatticeSquare>& added, std::vector<Point> marked_points,
    double scale) {
  std::vector<LatticeSquare> squares;
  squares.reserve(even.size() + added.size());
  for (const auto& s : even) {
    if (!(s == removed)) squares.push_back(s);
  }
  squares.insert(squares.end(), added.begin(), added.end());
  PolyominoRegion r = from_squares(std::move(squares), scale);
  r.removed_ = removed;
  r.added_ = added;
  r.marked_ = std::move(marked_points);
  // Reorder hole loops so that loop k + 1 runs past added square k.
  if (!r.loops_.empty()) {
    std::vector<BoundaryLoop> holes(r.loops_.begin() + 1, r.loops_.end());
    std::vector<BoundaryLoop> ordered{r.loops_.front()};
    std::vector<bool> used(holes.size(), false);
    for (const LatticeSquare& a : added) {
      const auto c = corners(a);
      for (std::size_t h = 0; h < holes.size(); ++h) {
        if (used[h]) continue;
        const auto& vs = holes[h].vertices;
        const bool touches = std::any_of(c.begin(), c.end(), [&](auto v) {
          return std::find(vs.begin(), vs.end(), v) != vs.end();
        });
        if (touches) {
          used[h] = true;
          ordered.push_back(holes[h]);
          break;
        }
      }
    }
    for (std::size_t h = 0; h < holes.size(); ++h) {
      if (!used[h]) ordered.push_back(holes[h]);
    }
    r.loops_ = std::move(ordered);
  }
  return r;
}

std::vector<LatticeSquare> PolyominoRegion::even_polyomino() const {
  std::vector<LatticeSquare> out;
  out.reserve(squares_.size() + 1);
  for (const auto& s : squares_.sorted()) {
    if (std::find(added_.begin(), added_.end(), s) == added_.end()) {
      out.push_back(s);
    }
  }
  if (removed_) out.push_back(*removed_);
  std::sort(out.begin(), out.end(), RowMajorLess{});
  return out;
}

int PolyominoRegion::loop_of(LatticeVertex v) const {
  for (std::size_t k = 0; k < loops_.size(); ++k) {
    const auto& vs = loops_[k].vertices;
    if (std::find(vs.begin(), vs.end(), v) != vs.end()) {
      return static_cast<int>(k);
    }
  }
  return -1;
}

std::string PolyominoRegion::dump() const {
  std::vector<LatticeSquare> all = squares_.sorted();
  if (removed_) all.push_back(*removed_);
  std::ostringstream os;
  if (all.empty()) {
    os << "# origin 0 0\n";
    return os.str();
  }
  int imin = all.front().i, imax = imin, jmin = all.front().j, jmax = jmin;
  for (const auto& s : all) {
    imin = std::min(imin, s.i);
    imax = std::max(imax, s.i);
    jmin = std::min(jmin, s.j);
    jmax = std::max(jmax, s.j);
  }
  os << "# origin " << imin << " " << jmin << "\n";
  for (int j = jmax; j >= jmin; --j) {
    for (int i = imin; i <= imax; ++i) {
      const LatticeSquare s{i, j};
      char c = '.';
      if (removed_ && *removed_ == s) {
        c = 'R';
      } else if (std::find(added_.begin(), added_.end(), s) != added_.end()) {
        c = 'A';
      } else if (squares_.contains(s)) {
        c = class_letter(color_of(s));
      }
      os << c;
    }
    os << "\n";
  }
  return os.str();
}

std::string RegionDiagnostics::summary() const {
  std::ostringstream os;
  os << "white " << white_count << ", black " << black_count;
  if (pass()) {
    os << ": pass";
    return os.str();
  }
  os << ": fail";
  for (const auto& d : defects) os << "\n  " << d;
  return os.str();
}

RegionDiagnostics validate_region(const PolyominoRegion& region) {
  RegionDiagnostics diag;
  const auto& squares = region.squares().sorted();
  for (const auto& s : squares) (is_white(s) ? diag.white_count : diag.black_count)++;
  diag.balance_defect = std::abs(diag.white_count - diag.black_count);
  if (diag.balance_defect != 0) {
    diag.defects.push_back("balance defect " +
                           std::to_string(diag.balance_defect));
  }
  if (squares.empty()) {
    diag.connected = false;
    diag.defects.push_back("region is empty");
    return diag;
  }
  diag.connected = connected(squares);
  if (!diag.connected) diag.defects.push_back("region is not connected");

  const auto& loops = region.boundary_loops();
  for (std::size_t k = 0; k < loops.size(); ++k) {
    if (!loops[k].simple) {
      diag.loops_simple = false;
      diag.defects.push_back("boundary loop " + std::to_string(k) +
                             " is not simple");
    }
  }

  const auto& removed = region.removed_square();
  if (!removed) {
    diag.defects.push_back("no removed square");
  } else {
    if (!is_black(*removed)) diag.defects.push_back("removed square not black");
    if (region.contains(*removed)) {
      diag.defects.push_back("removed square still in region");
    }
    const auto c = corners(*removed);
    const bool on_outer = std::any_of(c.begin(), c.end(), [&](auto v) {
      return region.loop_of(v) == 0;
    });
    if (!on_outer) {
      diag.defects.push_back("removed square not on the outer boundary");
    }
  }

  const auto& added = region.added_squares();
  if (static_cast<int>(added.size()) != region.genus()) {
    diag.defects.push_back("expected one added square per hole, got " +
                           std::to_string(added.size()) + " for genus " +
                           std::to_string(region.genus()));
  }
  for (std::size_t k = 0; k < added.size(); ++k) {
    const LatticeSquare a = added[k];
    const std::string tag = "added square " + std::to_string(k + 1) + " ";
    if (!is_black(a)) diag.defects.push_back(tag + "not black");
    if (!region.contains(a)) diag.defects.push_back(tag + "not in region");
    std::vector<int> touched;
    for (const LatticeVertex& v : corners(a)) {
      const int l = region.loop_of(v);
      if (l >= 0 && std::find(touched.begin(), touched.end(), l) == touched.end()) {
        touched.push_back(l);
      }
    }
    if (touched.size() != 1 || touched[0] != static_cast<int>(k) + 1) {
      diag.defects.push_back(tag + "does not mark exactly hole " +
                             std::to_string(k + 1));
    }
  }

  if (removed) {
    const SquareSet even(region.even_polyomino());
    for (const LatticeSquare& c : corner_squares(even)) {
      if (color_of(c) != ColorClass::kB1) {
        diag.corner_violations.push_back(c);
        diag.defects.push_back("corner square " + square_str(c) + " is " +
                               class_name(color_of(c)));
      }
    }
  }
  return diag;
}

namespace {

// Distance from `target` used to rank candidate marked squares; a straight
// run of four boundary squares through the candidate is preferred as long as
// it costs at most a few lattice steps.
struct Candidate {
  LatticeSquare square;
  bool flat;
  double distance;
};

std::vector<LatticeSquare> rank_candidates(std::vector<Candidate> cands,
                                           double scale) {
  auto by_distance = [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.square.i != b.square.i) return a.square.i < b.square.i;
    return a.square.j < b.square.j;
  };
  std::sort(cands.begin(), cands.end(), by_distance);
  if (cands.empty()) return {};
  const double limit = cands.front().distance + 4.0 * scale;
  std::vector<LatticeSquare> out;
  for (const auto& c : cands) {
    if (c.flat && c.distance <= limit) out.push_back(c.square);
  }
  for (const auto& c : cands) {
    if (std::find(out.begin(), out.end(), c.square) == out.end()) {
      out.push_back(c.square);
    }
  }
  return out;
}

// True if some run of 4 squares along `t` through `s` keeps `inside` on one
// side and `outside` across direction `n`.
template <class InsideFn, class OutsideFn>
bool flat_at(LatticeSquare s, std::array<int, 2> n, InsideFn inside,
             OutsideFn outside) {
  const std::array<int, 2> t = {-n[1], n[0]};
  for (int o = -3; o <= 0; ++o) {
    bool ok = true;
    for (int k = o; k <= o + 3 && ok; ++k) {
      const LatticeSquare a = shifted(s, k * t[0], k * t[1]);
      ok = inside(a) && outside(shifted(a, n[0], n[1]));
    }
    if (ok) return true;
  }
  return false;
}

[[noreturn]] void infeasible(const std::string& msg) {
  throw Error(ErrorCode::kInfeasibleGeometry, msg);
}

}  // namespace

PolyominoRegion build_temperleyan(const DomainSpec& spec, double scale) {
  spec.check();
  if (!(scale > 0.0)) infeasible("lattice scale must be positive");
  for (int h = 0; h < spec.genus(); ++h) {
    const Box hb = bounding_box(spec.holes[h]);
    if (std::min(hb.xmax - hb.xmin, hb.ymax - hb.ymin) < 4.0 * scale) {
      infeasible("hole " + std::to_string(h + 1) +
                 " is narrower than four lattice steps");
    }
  }
  const Box box = spec.bounding_box();
  const int i_lo = static_cast<int>(std::ceil(box.xmin / scale)) - 1;
  const int i_hi = static_cast<int>(std::floor(box.xmax / scale)) + 1;
  const int j_lo = static_cast<int>(std::ceil(box.ymin / scale)) - 1;
  const int j_hi = static_cast<int>(std::floor(box.ymax / scale)) + 1;

  std::vector<LatticeSquare> raster;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = i_lo; i <= i_hi; ++i) {
      if (spec.contains(square_center({i, j}, scale))) raster.push_back({i, j});
    }
  }
  if (raster.empty()) infeasible("no lattice square lies inside the domain");
  const SquareSet in_raster(raster);

  // Largest even polyomino in the raster: every B1 square, every white square
  // whose two B1 neighbours along its axis are present, every B0 square whose
  // full 3x3 block is present. Its corner squares are all B1 by construction.
  std::vector<LatticeSquare> even;
  for (const LatticeSquare& s : in_raster.sorted()) {
    bool keep = false;
    switch (color_of(s)) {
      case ColorClass::kB1: keep = true; break;
      case ColorClass::kW0:
        keep = in_raster.contains(shifted(s, 0, -1)) &&
               in_raster.contains(shifted(s, 0, 1));
        break;
      case ColorClass::kW1:
        keep = in_raster.contains(shifted(s, -1, 0)) &&
               in_raster.contains(shifted(s, 1, 0));
        break;
      case ColorClass::kB0:
        keep = true;
        for (int dj = -1; dj <= 1 && keep; ++dj) {
          for (int di = -1; di <= 1 && keep; ++di) {
            keep = in_raster.contains(shifted(s, di, dj));
          }
        }
        break;
    }
    if (keep) even.push_back(s);
  }
  if (even.size() < 3 || !connected(even)) {
    infeasible("the largest even polyomino at this scale is empty or "
               "disconnected");
  }
  const SquareSet even_set(even, 2);

  // Complement components inside the padded box: the one touching the frame
  // is the exterior, the others are holes.
  std::vector<LatticeSquare> complement;
  for (int y = 0; y < even_set.height(); ++y) {
    for (int x = 0; x < even_set.width(); ++x) {
      const LatticeSquare s{even_set.imin() + x, even_set.jmin() + y};
      if (!even_set.contains(s)) complement.push_back(s);
    }
  }
  const SquareSet comp_set(complement);
  auto comps = components(comp_set);
  std::vector<int> comp_of(comp_set.size(), -1);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (const auto& s : comps[c]) comp_of[comp_set.index(s)] = static_cast<int>(c);
  }
  const int exterior = comp_of[comp_set.index({even_set.imin(), even_set.jmin()})];

  const int g = spec.genus();
  std::vector<int> hole_comp(g, -1);
  int hole_count = 0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (static_cast<int>(c) == exterior) continue;
    ++hole_count;
    std::vector<int> votes(g, 0);
    for (const auto& s : comps[c]) {
      for (int h = 0; h < g; ++h) {
        if (shape_contains(spec.holes[h], square_center(s, scale))) ++votes[h];
      }
    }
    const auto best = std::max_element(votes.begin(), votes.end());
    if (best == votes.end() || *best == 0) {
      infeasible("the even polyomino has a hole that matches no domain hole");
    }
    const int h = static_cast<int>(best - votes.begin());
    if (hole_comp[h] >= 0) infeasible("domain hole " + std::to_string(h + 1) +
                                      " splits into several lattice holes");
    if (comps[c].size() < 2) {
      infeasible("domain hole " + std::to_string(h + 1) +
                 " is narrower than the lattice at this scale");
    }
    hole_comp[h] = static_cast<int>(c);
  }
  if (hole_count != g) {
    infeasible("found " + std::to_string(hole_count) +
               " lattice holes, expected " + std::to_string(g));
  }
  auto in_comp = [&](int c) {
    return [&, c](LatticeSquare s) {
      const int k = comp_set.index(s);
      return k >= 0 && comp_of[k] == c;
    };
  };
  auto in_even = [&](LatticeSquare s) { return even_set.contains(s); };

  // The even polyomino must follow the domain boundary to within O(scale).
  for (const BoundaryLoop& loop : trace_boundary(even_set)) {
    const LatticeVertex v0 = loop.vertices[0];
    const LatticeVertex v1 = loop.vertices[1];
    const LatticeSquare across = right_of(v0, v1.a - v0.a, v1.b - v0.b);
    const int c = comp_of[comp_set.index(across)];
    int component = 0;
    for (int h = 0; h < g; ++h) {
      if (hole_comp[h] == c) component = h + 1;
    }
    const Shape& shape = component == 0 ? spec.outer : spec.holes[component - 1];
    for (const LatticeVertex& v : loop.vertices) {
      if (distance_to_boundary(shape, vertex_position(v, scale)) > 3.0 * scale) {
        infeasible("the even polyomino strays from boundary component " +
                   std::to_string(component) + " at this scale");
      }
    }
  }

  // Removed square: black (necessarily B1) on the outer boundary.
  std::vector<Candidate> outer_cands;
  for (const LatticeSquare& s : even_set.sorted()) {
    if (!is_black(s)) continue;
    for (const auto& n : kSides) {
      if (!in_comp(exterior)(shifted(s, n[0], n[1]))) continue;
      outer_cands.push_back(
          {s, flat_at(s, n, in_even, in_comp(exterior)),
           norm(square_center(s, scale) - spec.marked_points[0])});
      break;
    }
  }
  std::optional<LatticeSquare> removed;
  for (const LatticeSquare& s : rank_candidates(outer_cands, scale)) {
    std::vector<LatticeSquare> rest;
    for (const auto& e : even) {
      if (!(e == s)) rest.push_back(e);
    }
    if (connected(rest)) {
      removed = s;
      break;
    }
  }
  if (!removed) infeasible("no removable black square on the outer boundary");

  // Added squares: one black square inside each hole, next to the region.
  std::vector<LatticeSquare> added;
  for (int h = 0; h < g; ++h) {
    std::vector<Candidate> cands;
    for (const LatticeSquare& s : comps[hole_comp[h]]) {
      if (!is_black(s)) continue;
      for (const auto& n : kSides) {
        if (!in_even(shifted(s, n[0], n[1]))) continue;
        const std::array<int, 2> into_hole = {-n[0], -n[1]};
        const LatticeSquare r = shifted(s, n[0], n[1]);
        cands.push_back(
            {s, flat_at(r, into_hole, in_even, in_comp(hole_comp[h])),
             norm(square_center(s, scale) - spec.marked_points[h + 1])});
        break;
      }
    }
    bool placed = false;
    for (const LatticeSquare& s : rank_candidates(cands, scale)) {
      std::vector<LatticeSquare> trial = added;
      trial.push_back(s);
      std::vector<LatticeSquare> squares;
      for (const auto& e : even) {
        if (!(e == *removed)) squares.push_back(e);
      }
      squares.insert(squares.end(), trial.begin(), trial.end());
      const auto loops = trace_boundary(SquareSet(squares));
      const bool simple = std::all_of(loops.begin(), loops.end(),
                                      [](const auto& l) { return l.simple; });
      if (simple && static_cast<int>(loops.size()) == g + 1) {
        added = std::move(trial);
        placed = true;
        break;
      }
    }
    if (!placed) {
      infeasible("no black square can mark hole " + std::to_string(h + 1));
    }
  }

  PolyominoRegion region = PolyominoRegion::temperleyan(
      even, *removed, added, spec.marked_points, scale);
  const RegionDiagnostics diag = validate_region(region);
  if (diag.balance_defect != 0) {
    throw Error(ErrorCode::kUnbalancedRegion, diag.summary());
  }
  if (!diag.pass()) infeasible(diag.summary());
  return region;
}

DomainSpec lattice_domain(const PolyominoRegion& region) {
  const double scale = region.scale();
  const auto loops = trace_boundary(SquareSet(region.even_polyomino()));
  const int g = static_cast<int>(loops.size()) - 1;
  if (g < 0) throw Error(ErrorCode::kUnsupportedDomain, "empty region");
  auto polygon = [&](const BoundaryLoop& loop) {
    if (!loop.simple) {
      throw Error(ErrorCode::kUnsupportedDomain, "pinched boundary loop");
    }
    RectilinearPolygon p;
    for (const auto& v : loop.vertices) p.vertices.push_back(vertex_position(v, scale));
    return Shape{p};
  };
  DomainSpec spec;
  spec.outer = polygon(loops[0]);
  const auto& added = region.added_squares();
  if (region.removed_square() && static_cast<int>(added.size()) == g) {
    // Hole k follows added[k]: the loop through one of its corners.
    std::vector<int> order;
    for (const auto& a : added) {
      const auto c = corners(a);
      int found = -1;
      for (int k = 1; k <= g && found < 0; ++k) {
        for (const auto& v : loops[k].vertices) {
          if (std::find(c.begin(), c.end(), v) != c.end()) found = k;
        }
      }
      if (found < 0) {
        throw Error(ErrorCode::kUnsupportedDomain, "added square off every hole");
      }
      order.push_back(found);
    }
    spec.marked_points.push_back(nearest_boundary_point(
        spec.outer, square_center(*region.removed_square(), scale)));
    for (int k = 0; k < g; ++k) {
      spec.holes.push_back(polygon(loops[order[k]]));
      spec.marked_points.push_back(
          nearest_boundary_point(spec.holes.back(), square_center(added[k], scale)));
    }
  } else {
    if (static_cast<int>(region.marked_points().size()) != g + 1) {
      throw Error(ErrorCode::kUnsupportedDomain, "region has no marked points");
    }
    for (int k = 1; k <= g; ++k) spec.holes.push_back(polygon(loops[k]));
    spec.marked_points.push_back(
        nearest_boundary_point(spec.outer, region.marked_points()[0]));
    for (int k = 0; k < g; ++k) {
      spec.marked_points.push_back(
          nearest_boundary_point(spec.holes[k], region.marked_points()[k + 1]));
    }
  }
  spec.check();
  return spec;
}

}  // namespace dimerhole
