#include "dimerhole/height.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <tuple>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

[[noreturn]] void inconsistent(const std::string& msg) {
  throw Error(ErrorCode::kInconsistentTiling, msg);
}

// partner[k] = region index of the square sharing a domino with square k.
std::vector<int> partners(const PolyominoRegion& region, const Tiling& tiling) {
  const SquareSet& set = region.squares();
  std::vector<int> partner(set.size(), -1);
  for (const Domino& d : tiling.dominoes) {
    const int w = set.index(d.white);
    const int b = set.index(d.black);
    if (w < 0 || b < 0 || !is_white(d.white) || is_white(d.black) ||
        std::abs(d.white.i - d.black.i) + std::abs(d.white.j - d.black.j) != 1) {
      inconsistent("domino outside the region or not a white-black pair");
    }
    if (partner[w] >= 0 || partner[b] >= 0) inconsistent("square covered twice");
    partner[w] = b;
    partner[b] = w;
  }
  if (std::find(partner.begin(), partner.end(), -1) != partner.end()) {
    inconsistent("tiling leaves a square uncovered");
  }
  return partner;
}

bool crossed(const HeightLattice::Edge& e, const std::vector<int>& partner) {
  return e.left >= 0 && e.right >= 0 && partner[e.left] == e.right;
}

}  // namespace

HeightLattice::HeightLattice(const PolyominoRegion& region) : region_(region) {
  const SquareSet& squares = region_.squares();
  std::vector<LatticeSquare> corners;
  corners.reserve(4 * squares.size());
  for (const LatticeSquare& s : squares.sorted()) {
    for (int dj = 0; dj <= 1; ++dj) {
      for (int di = 0; di <= 1; ++di) corners.push_back({s.i + di, s.j + dj});
    }
  }
  index_grid_ = SquareSet(corners);
  for (const LatticeSquare& c : index_grid_.sorted()) vertices_.push_back({c.i, c.j});

  // Edge (a, b, horizontal?) -> index.
  std::map<std::tuple<int, int, int>, int> seen;
  auto add = [&](LatticeVertex from, bool horizontal) {
    const auto key = std::make_tuple(from.a, from.b, horizontal ? 0 : 1);
    if (seen.count(key)) return;
    Edge e;
    e.from = vertex_index(from);
    LatticeSquare left, right;
    if (horizontal) {
      e.to = vertex_index({from.a + 1, from.b});
      left = {from.a, from.b};
      right = {from.a, from.b - 1};
    } else {
      e.to = vertex_index({from.a, from.b + 1});
      left = {from.a - 1, from.b};
      right = {from.a, from.b};
    }
    e.left = squares.index(left);
    e.right = squares.index(right);
    e.white_left = is_white(left);
    seen[key] = static_cast<int>(edges_.size());
    edges_.push_back(e);
  };
  for (const LatticeSquare& s : squares.sorted()) {
    add({s.i, s.j}, true);
    add({s.i, s.j + 1}, true);
    add({s.i, s.j}, false);
    add({s.i + 1, s.j}, false);
  }

  std::vector<std::vector<int>> incident(vertices_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    incident[edges_[k].from].push_back(static_cast<int>(k));
    incident[edges_[k].to].push_back(static_cast<int>(k));
  }
  reference_ = -1;
  if (!region_.boundary_loops().empty()) {
    LatticeVertex best = region_.boundary_loops()[0].vertices.front();
    for (const LatticeVertex& v : region_.boundary_loops()[0].vertices) {
      if (std::tie(v.a, v.b) < std::tie(best.a, best.b)) best = v;
    }
    reference_ = vertex_index(best);
  }
  parent_edge_.assign(vertices_.size(), -1);
  parent_forward_.assign(vertices_.size(), 0);
  if (reference_ < 0) return;
  std::vector<char> seen_v(vertices_.size(), 0);
  std::deque<int> queue{reference_};
  seen_v[reference_] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    bfs_order_.push_back(v);
    for (int k : incident[v]) {
      const Edge& e = edges_[k];
      const int u = e.from == v ? e.to : e.from;
      if (seen_v[u]) continue;
      seen_v[u] = 1;
      parent_edge_[u] = k;
      parent_forward_[u] = e.from == v;
      queue.push_back(u);
    }
  }
}

int HeightLattice::vertex_index(LatticeVertex v) const {
  return index_grid_.index({v.a, v.b});
}

std::vector<std::pair<int, int>> HeightLattice::path_to(int v) const {
  std::vector<std::pair<int, int>> path;
  while (parent_edge_[v] >= 0) {
    const int k = parent_edge_[v];
    const bool fwd = parent_forward_[v];
    path.push_back({k, fwd ? 1 : -1});
    v = fwd ? edges_[k].from : edges_[k].to;
  }
  return path;
}

std::vector<int> HeightLattice::loop_vertices(int k) const {
  std::vector<int> out;
  for (const LatticeVertex& v : region_.boundary_loops().at(k).vertices) {
    out.push_back(vertex_index(v));
  }
  return out;
}

int HeightLattice::nearest_on_loop(int k, Point p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v : loop_vertices(k)) {
    const double d = norm(vertex_position(vertices_[v], region_.scale()) - p);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

std::vector<int> HeightLattice::window(Point p, double radius) const {
  std::vector<int> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (norm(vertex_position(vertices_[v], region_.scale()) - p) <= radius) {
      out.push_back(static_cast<int>(v));
    }
  }
  return out;
}

int edge_increment(const HeightLattice::Edge& e, bool is_crossed) {
  const int up = is_crossed ? 3 : -1;
  return e.white_left ? up : -up;
}

std::vector<int> face_sums(const HeightLattice& lattice, const Tiling& tiling) {
  const auto partner = partners(lattice.region(), tiling);
  const auto& edges = lattice.edges();
  // Walking a square counter-clockwise traverses each stored (+x or +y) edge
  // forwards when the square is on the edge's left, backwards otherwise.
  std::vector<int> sums(lattice.region().squares().size(), 0);
  for (const auto& e : edges) {
    const int inc = edge_increment(e, crossed(e, partner));
    if (e.left >= 0) sums[e.left] += inc;
    if (e.right >= 0) sums[e.right] -= inc;
  }
  return sums;
}

HeightField height_field(const HeightLattice& lattice, const Tiling& tiling) {
  const auto partner = partners(lattice.region(), tiling);
  const auto& edges = lattice.edges();
  HeightField h;
  h.values.assign(lattice.vertices().size(), 0);
  for (int v : lattice.bfs_order()) {
    const int k = lattice.parent_edge(v);
    if (k < 0) continue;
    const auto& e = edges[k];
    const int inc = edge_increment(e, crossed(e, partner));
    h.values[v] = lattice.parent_forward(v) ? h.values[e.from] + inc
                                            : h.values[e.to] - inc;
  }
  for (const auto& e : edges) {
    if (h.values[e.to] - h.values[e.from] != edge_increment(e, crossed(e, partner))) {
      inconsistent("height increments do not close up around a face");
    }
  }
  return h;
}

std::vector<double> crossing_probabilities(const KasteleynSystem& system,
                                           const HeightLattice& lattice) {
  const auto& squares = lattice.region().squares().sorted();
  const Eigen::MatrixXd& m = system.real_inverse();
  std::vector<double> p(lattice.edges().size(), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& e = lattice.edges()[k];
    if (e.left < 0 || e.right < 0) continue;
    const LatticeSquare ws = e.white_left ? squares[e.left] : squares[e.right];
    const LatticeSquare bs = e.white_left ? squares[e.right] : squares[e.left];
    const int w = system.white_index(ws), b = system.black_index(bs);
    p[k] = system.real_weight(w, b) * m(b, w);
  }
  return p;
}

ExpectedHeightField expected_height_field(const KasteleynSystem& system,
                                          const HeightLattice& lattice) {
  if (system.singular()) throw Error(ErrorCode::kUntileable, "region has no tiling");
  const auto p = crossing_probabilities(system, lattice);
  const auto& edges = lattice.edges();
  ExpectedHeightField out;
  out.values.assign(lattice.vertices().size(), 0.0);
  for (int v : lattice.bfs_order()) {
    const int k = lattice.parent_edge(v);
    if (k < 0) continue;
    const auto& e = edges[k];
    const double inc = (e.white_left ? 1.0 : -1.0) * (4.0 * p[k] - 1.0);
    out.values[v] = lattice.parent_forward(v) ? out.values[e.from] + inc
                                              : out.values[e.to] - inc;
  }
  return out;
}

double exact_height_covariance(const KasteleynSystem& system,
                               const HeightLattice& lattice,
                               const std::vector<std::pair<int, double>>& a,
                               const std::vector<std::pair<int, double>>& b) {
  const auto& edges = lattice.edges();
  const auto& squares = lattice.region().squares().sorted();
  const Eigen::MatrixXd& m = system.real_inverse();
  // Random part of h(v): sum over interior tree edges of +-4 * 1{crossed}.
  auto coefficients = [&](const std::vector<std::pair<int, double>>& weights) {
    std::map<int, double> c;
    for (const auto& [v, wgt] : weights) {
      for (const auto& [k, sign] : lattice.path_to(v)) {
        const auto& e = edges[k];
        if (e.left < 0 || e.right < 0) continue;
        c[k] += wgt * sign * (e.white_left ? 4.0 : -4.0);
      }
    }
    return std::vector<std::pair<int, double>>(c.begin(), c.end());
  };
  struct Pair {
    int w, b;
    double k;
  };
  auto pair_of = [&](int k) {
    const auto& e = edges[k];
    const LatticeSquare ws = e.white_left ? squares[e.left] : squares[e.right];
    const LatticeSquare bs = e.white_left ? squares[e.right] : squares[e.left];
    const int w = system.white_index(ws), bb = system.black_index(bs);
    return Pair{w, bb, system.real_weight(w, bb)};
  };
  const auto ca = coefficients(a);
  const auto cb = coefficients(b);
  std::vector<Pair> pb;
  pb.reserve(cb.size());
  for (const auto& [k, unused] : cb) pb.push_back(pair_of(k));
  double total = 0.0;
  for (const auto& [ka, wa] : ca) {
    const Pair e = pair_of(ka);
    const double pe = e.k * m(e.b, e.w);
    for (std::size_t t = 0; t < cb.size(); ++t) {
      const Pair& f = pb[t];
      double cov;
      if (cb[t].first == ka) {
        cov = pe * (1.0 - pe);
      } else {
        cov = -e.k * f.k * m(e.b, f.w) * m(f.b, e.w);
      }
      total += wa * cb[t].second * cov;
    }
  }
  return total;
}

std::vector<double> hole_heights(const HeightLattice& lattice, const HeightField& h,
                                 const ExpectedHeightField& expected) {
  const PolyominoRegion& region = lattice.region();
  std::vector<double> z;
  for (int j = 1; j <= region.genus(); ++j) {
    const int v = static_cast<int>(region.marked_points().size()) > j
                      ? lattice.nearest_on_loop(j, region.marked_points()[j])
                      : lattice.loop_vertices(j).front();
    z.push_back(h.values[v] - expected.values[v]);
  }
  return z;
}

std::vector<double> centered_heights(
    const HeightLattice& lattice, const HeightField& h,
    const ExpectedHeightField& expected, const std::vector<double>& z,
    const std::vector<std::vector<double>>& harmonic,
    const std::vector<int>& vertices) {
  const std::size_t g = static_cast<std::size_t>(lattice.region().genus());
  if (harmonic.size() != g || z.size() != g) {
    throw Error(ErrorCode::kMissingHarmonicData,
                "need one harmonic measure per hole, got " +
                    std::to_string(harmonic.size()) + " for genus " +
                    std::to_string(g));
  }
  for (const auto& f : harmonic) {
    if (f.size() != lattice.vertices().size()) {
      throw Error(ErrorCode::kMissingHarmonicData,
                  "harmonic measure does not cover every lattice vertex");
    }
  }
  std::vector<double> out;
  out.reserve(vertices.size());
  for (int v : vertices) {
    double x = h.values[v] - expected.values[v];
    for (std::size_t j = 0; j < g; ++j) x -= z[j] * harmonic[j][v];
    out.push_back(x);
  }
  return out;
}

}  // namespace dimerhole
