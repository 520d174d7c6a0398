#pragma once

#include <vector>

#include "dimerhole/kasteleyn.hpp"
#include "dimerhole/region.hpp"

namespace dimerhole {

// Vertices and edges of a region's lattice graph, with a breadth-first
// spanning tree rooted at the smallest (x, then y) outer-boundary vertex.
// Edges are directed towards +x or +y.
class HeightLattice {
 public:
  struct Edge {
    int from = 0;
    int to = 0;
    int left = -1;   // region square index on the left, or -1
    int right = -1;  // region square index on the right, or -1
    bool white_left = false;
  };

  explicit HeightLattice(const PolyominoRegion& region);

  const PolyominoRegion& region() const { return region_; }
  const std::vector<LatticeVertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int vertex_index(LatticeVertex v) const;
  int reference() const { return reference_; }
  // Vertices in breadth-first order from the reference.
  const std::vector<int>& bfs_order() const { return bfs_order_; }
  // Tree edge leading into vertex v (from its parent), or -1 at the root.
  int parent_edge(int v) const { return parent_edge_[v]; }
  // Whether the tree edge is walked forwards (from -> to) to reach v.
  bool parent_forward(int v) const { return parent_forward_[v]; }
  // Signed edge coefficients of the tree path from the reference to v.
  std::vector<std::pair<int, int>> path_to(int v) const;
  // Vertices of boundary loop k.
  std::vector<int> loop_vertices(int k) const;
  // Loop-k vertex nearest to `p` (continuum coordinates).
  int nearest_on_loop(int k, Point p) const;
  // Vertices within distance `radius` of `p`.
  std::vector<int> window(Point p, double radius) const;

 private:
  PolyominoRegion region_;
  std::vector<LatticeVertex> vertices_;
  SquareSet index_grid_;  // vertices stored as squares with the same coordinates
  std::vector<Edge> edges_;
  std::vector<int> parent_edge_;
  std::vector<char> parent_forward_;
  std::vector<int> bfs_order_;
  int reference_ = 0;
};

// Height of one tiling at every lattice vertex, 0 at the reference vertex.
struct HeightField {
  std::vector<int> values;  // indexed like HeightLattice::vertices()
};

// Increment along edge e in its stored direction when `crossed` says whether
// the edge separates the two squares of a domino.
int edge_increment(const HeightLattice::Edge& e, bool crossed);

// Throws kInconsistentTiling if the tiling does not cover the region or the
// increments around some square do not sum to zero.
HeightField height_field(const HeightLattice& lattice, const Tiling& tiling);

// Sum of increments around the boundary of every region square (all zero for
// a valid tiling).
std::vector<int> face_sums(const HeightLattice& lattice, const Tiling& tiling);

// Probability that each edge separates the two squares of one domino.
std::vector<double> crossing_probabilities(const KasteleynSystem& system,
                                           const HeightLattice& lattice);

struct ExpectedHeightField {
  std::vector<double> values;
};

// Exact E[h(v)] for every vertex, accumulated along tree paths.
ExpectedHeightField expected_height_field(const KasteleynSystem& system,
                                          const HeightLattice& lattice);

// Exact Cov(sum_v a_v h(v), sum_v b_v h(v)) from pair probabilities of K^-1.
// Each list holds (vertex index, weight) pairs.
double exact_height_covariance(const KasteleynSystem& system,
                               const HeightLattice& lattice,
                               const std::vector<std::pair<int, double>>& a,
                               const std::vector<std::pair<int, double>>& b);

// Z_j for one tiling, read at the loop-j vertex nearest to marked point d_j.
std::vector<double> hole_heights(const HeightLattice& lattice,
                                 const HeightField& h,
                                 const ExpectedHeightField& expected);

// h - E h - sum_j Z_j f_j at the listed vertices. `harmonic[j][v]` is f_{j+1}
// at vertex v; throws kMissingHarmonicData if it does not cover every hole
// and vertex.
std::vector<double> centered_heights(
    const HeightLattice& lattice, const HeightField& h,
    const ExpectedHeightField& expected, const std::vector<double>& z,
    const std::vector<std::vector<double>>& harmonic,
    const std::vector<int>& vertices);

}  // namespace dimerhole
