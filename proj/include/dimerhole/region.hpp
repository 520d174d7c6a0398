#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimerhole/geometry.hpp"

namespace dimerhole {

// Checkerboard classes. The square centred at the origin is white.
enum class ColorClass { kW0, kW1, kB0, kB1 };

struct LatticeSquare {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const LatticeSquare&, const LatticeSquare&) = default;
};

// Row-major order (by j, then i); every enumeration in the library uses it.
struct RowMajorLess {
  bool operator()(const LatticeSquare& a, const LatticeSquare& b) const {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  }
};

ColorClass color_of(LatticeSquare square);
inline bool is_white(LatticeSquare s) { return ((s.i + s.j) & 1) == 0; }
char class_letter(ColorClass c);

// Lattice vertex (a, b) is the lower-left corner of square (a, b); its
// continuum position is ((a - 1/2) * scale, (b - 1/2) * scale).
struct LatticeVertex {
  int a = 0;
  int b = 0;

  friend auto operator<=>(const LatticeVertex&, const LatticeVertex&) = default;
};

Point square_center(LatticeSquare s, double scale);
Point vertex_position(LatticeVertex v, double scale);

// Closed lattice path with the region on its left; the first vertex is not
// repeated at the end.
struct BoundaryLoop {
  std::vector<LatticeVertex> vertices;
  bool simple = true;

  // Positive for the counter-clockwise outer loop, negative for holes.
  long long twice_signed_area() const;
};

// Dense membership grid over a bounding box of lattice squares.
class SquareSet {
 public:
  SquareSet() = default;
  explicit SquareSet(const std::vector<LatticeSquare>& squares, int margin = 1);

  bool contains(LatticeSquare s) const { return index(s) >= 0; }
  // Position in the row-major sorted list, or -1.
  int index(LatticeSquare s) const;
  const std::vector<LatticeSquare>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

  int imin() const { return i0_; }
  int jmin() const { return j0_; }
  int width() const { return w_; }
  int height() const { return h_; }

 private:
  std::vector<LatticeSquare> sorted_;
  std::vector<int> grid_;
  int i0_ = 0, j0_ = 0, w_ = 0, h_ = 0;
};

// A finite polyomino on scale*Z^2. Regions built from a DomainSpec carry the
// removed outer square, one added square per hole and the continuum marked
// points; raw regions (used for linear-algebra tests) may carry none.
class PolyominoRegion {
 public:
  // Raw region from an explicit square list (duplicates removed).
  static PolyominoRegion from_squares(std::vector<LatticeSquare> squares,
                                      double scale = 1.0);

  // Region whose even polyomino is `even`, with `removed` taken out and
  // `added` put in. Hole loops are ordered so that loop k + 1 runs past
  // added[k].
  static PolyominoRegion temperleyan(const std::vector<LatticeSquare>& even,
                                     LatticeSquare removed,
                                     const std::vector<LatticeSquare>& added,
                                     std::vector<Point> marked_points,
                                     double scale);

  double scale() const { return scale_; }
  const SquareSet& squares() const { return squares_; }
  bool contains(LatticeSquare s) const { return squares_.contains(s); }

  const std::optional<LatticeSquare>& removed_square() const {
    return removed_;
  }
  const std::vector<LatticeSquare>& added_squares() const { return added_; }
  // Loop 0 is the outer boundary, loop j the boundary of hole j.
  const std::vector<BoundaryLoop>& boundary_loops() const { return loops_; }
  const std::vector<Point>& marked_points() const { return marked_; }
  int genus() const { return static_cast<int>(loops_.size()) - 1; }

  // Squares of the underlying even polyomino (removed square restored,
  // added squares dropped).
  std::vector<LatticeSquare> even_polyomino() const;

  // One character per square, top row first: class letter for region
  // squares, 'R' removed, 'A' added, '.' elsewhere. The first line records
  // the lattice origin.
  std::string dump() const;

  // Loop index for a boundary vertex, or -1 for an interior/absent vertex.
  int loop_of(LatticeVertex v) const;

 private:
  double scale_ = 1.0;
  SquareSet squares_;
  std::optional<LatticeSquare> removed_;
  std::vector<LatticeSquare> added_;
  std::vector<BoundaryLoop> loops_;
  std::vector<Point> marked_;
};

// Boundary loops of an arbitrary square set; the outer loop comes first and
// holes follow in order of their smallest vertex.
std::vector<BoundaryLoop> trace_boundary(const SquareSet& squares);

struct RegionDiagnostics {
  int white_count = 0;
  int black_count = 0;
  int balance_defect = 0;  // |white - black|
  std::vector<LatticeSquare> corner_violations;
  bool loops_simple = true;
  bool connected = true;
  std::vector<std::string> defects;

  bool pass() const { return defects.empty(); }
  std::string summary() const;
};

RegionDiagnostics validate_region(const PolyominoRegion& region);

// Rasterises `spec` at lattice scale `scale`, extracts the largest even
// polyomino inside it, removes the outer black square nearest d_0 and adds one
// black square next to each hole nearest d_j (straight boundary runs
// preferred). Throws kInfeasibleGeometry or kUnbalancedRegion.
PolyominoRegion build_temperleyan(const DomainSpec& spec, double scale);

// The continuum domain a region lives on: the even polyomino's boundary loops
// as rectilinear polygons, with marked points at the removed and added
// squares (or the region's own marked points) moved onto their loops. Throws
// kUnsupportedDomain for pinched loops or missing marked points.
DomainSpec lattice_domain(const PolyominoRegion& region);

}  // namespace dimerhole
