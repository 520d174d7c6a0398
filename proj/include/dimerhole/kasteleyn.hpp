#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dimerhole/region.hpp"

namespace dimerhole {

struct Domino {
  LatticeSquare white;
  LatticeSquare black;

  friend bool operator==(const Domino&, const Domino&) = default;
};

struct Tiling {
  std::vector<Domino> dominoes;  // sorted by white square, row-major

  void normalize();
  // One "wx,wy-bx,by" line per domino.
  std::string to_text() const;
  static Tiling from_text(const std::string& text);

  friend bool operator==(const Tiling&, const Tiling&) = default;
};

// Kasteleyn matrix of a balanced region: rows are white squares, columns black
// squares, both in row-major order. K(w, b) is 1 for a horizontal neighbour
// and i for a vertical one. These weights count tilings (|det K|) as long as
// every hole of the region contains an even number of squares, which holds
// for Temperleyan regions.
//
// Numerics run on the equivalent real gauge K'(w, b) = i^(y_w - y_b) K(w, b),
// which is +1 for horizontal pairs and for black-above-white, -1 for
// black-below-white. The two differ by diagonal unit factors, so |det| and all
// products K(w,b) K^-1(b,w) agree.
class KasteleynSystem {
 public:
  // Throws kUnbalancedRegion if the colour counts differ.
  static KasteleynSystem build(const PolyominoRegion& region);

  const PolyominoRegion& region() const { return region_; }
  int size() const { return static_cast<int>(whites_.size()); }
  const std::vector<LatticeSquare>& white_order() const { return whites_; }
  const std::vector<LatticeSquare>& black_order() const { return blacks_; }
  int white_index(LatticeSquare s) const;
  int black_index(LatticeSquare s) const;

  // Black neighbours of white w with their real-gauge weights.
  const std::vector<std::pair<int, double>>& neighbours(int w) const {
    return adjacency_[w];
  }

  std::complex<double> weight(int w, int b) const;  // complex convention
  double real_weight(int w, int b) const;
  Eigen::MatrixXcd complex_matrix() const;
  const Eigen::MatrixXd& real_matrix() const { return kreal_; }

  bool singular() const { return singular_; }
  double log_abs_det() const { return log_abs_det_; }
  // (K')^-1, blacks x whites. Throws kUntileable if singular.
  const Eigen::MatrixXd& real_inverse() const;
  // Entry of K^-1 in the complex convention.
  std::complex<double> inverse_entry(int b, int w) const;

 private:
  PolyominoRegion region_;
  std::vector<LatticeSquare> whites_;
  std::vector<LatticeSquare> blacks_;
  SquareSet white_set_;
  SquareSet black_set_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  Eigen::MatrixXd kreal_;
  Eigen::MatrixXd inverse_;
  double log_abs_det_ = 0.0;
  bool singular_ = false;
};

struct TilingCount {
  double log_count = 0.0;              // -inf when untileable
  std::optional<std::uint64_t> exact;  // for at most kExactCountLimit squares
};

inline constexpr int kExactCountLimit = 24;

TilingCount count_tilings(const KasteleynSystem& system);

// |det K| by fraction-free elimination over the Gaussian integers.
std::uint64_t exact_determinant_magnitude(const KasteleynSystem& system);

// Every tiling, found by covering the lowest uncovered square first. Throws
// kRegionTooLarge beyond kExactCountLimit squares.
std::vector<Tiling> enumerate_tilings(const PolyominoRegion& region);

// Probability that all `edges` appear together. Throws kInvalidEdge for a
// non-adjacent or overlapping pair.
double edge_probability(const KasteleynSystem& system,
                        const std::vector<Domino>& edges);

// Dense inverse conditioned on placed dominoes, updated one rank-one step at a
// time. Used as the reference for the blocked sampler and for conditioning
// checks.
class ConditionedInverse {
 public:
  explicit ConditionedInverse(const KasteleynSystem& system);

  // P(w matched to b | dominoes placed so far).
  double probability(int w, int b) const;
  void place(int w, int b);

 private:
  const KasteleynSystem* system_;
  Eigen::MatrixXd m_;
  std::vector<char> white_used_;
  std::vector<char> black_used_;
};

}  // namespace dimerhole
