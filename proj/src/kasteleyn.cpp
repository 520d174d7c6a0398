#include "dimerhole/kasteleyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

std::complex<double> i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

bool adjacent(LatticeSquare a, LatticeSquare b) {
  return std::abs(a.i - b.i) + std::abs(a.j - b.j) == 1;
}

struct GaussInt {
  __int128 re = 0;
  __int128 im = 0;

  bool zero() const { return re == 0 && im == 0; }
  friend GaussInt operator*(GaussInt a, GaussInt b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussInt operator-(GaussInt a, GaussInt b) {
    return {a.re - b.re, a.im - b.im};
  }
};

// a / b for a known to be a multiple of b.
GaussInt exact_div(GaussInt a, GaussInt b) {
  const __int128 n = b.re * b.re + b.im * b.im;
  const GaussInt num = a * GaussInt{b.re, -b.im};
  if (num.re % n != 0 || num.im % n != 0) {
    throw Error(ErrorCode::kSolverDiverged, "inexact Gaussian-integer division");
  }
  return {num.re / n, num.im / n};
}

void enumerate_from(const SquareSet& set, std::vector<char>& covered,
                    std::vector<Domino>& current, std::vector<Tiling>& out) {
  const auto& sq = set.sorted();
  std::size_t k = 0;
  while (k < sq.size() && covered[k]) ++k;
  if (k == sq.size()) {
    Tiling t{current};
    t.normalize();
    out.push_back(std::move(t));
    return;
  }
  const LatticeSquare s = sq[k];
  for (const LatticeSquare n : {LatticeSquare{s.i + 1, s.j}, LatticeSquare{s.i, s.j + 1}}) {
    const int idx = set.index(n);
    if (idx < 0 || covered[idx]) continue;
    covered[k] = covered[idx] = 1;
    current.push_back(is_white(s) ? Domino{s, n} : Domino{n, s});
    enumerate_from(set, covered, current, out);
    current.pop_back();
    covered[k] = covered[idx] = 0;
  }
}

}  // namespace

void Tiling::normalize() {
  std::sort(dominoes.begin(), dominoes.end(),
            [](const Domino& a, const Domino& b) {
              return RowMajorLess{}(a.white, b.white);
            });
}

std::string Tiling::to_text() const {
  std::ostringstream os;
  for (const Domino& d : dominoes) {
    os << d.white.i << "," << d.white.j << "-" << d.black.i << "," << d.black.j
       << "\n";
  }
  return os.str();
}

Tiling Tiling::from_text(const std::string& text) {
  Tiling t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Domino d;
    char c1, c2, c3;
    std::istringstream ls(line);
    if (!(ls >> d.white.i >> c1 >> d.white.j >> c2 >> d.black.i >> c3 >>
          d.black.j) ||
        c1 != ',' || c2 != '-' || c3 != ',') {
      throw Error(ErrorCode::kIo, "malformed domino line '" + line + "'");
    }
    t.dominoes.push_back(d);
  }
  t.normalize();
  return t;
}

KasteleynSystem KasteleynSystem::build(const PolyominoRegion& region) {
  KasteleynSystem sys;
  sys.region_ = region;
  for (const LatticeSquare& s : region.squares().sorted()) {
    (is_white(s) ? sys.whites_ : sys.blacks_).push_back(s);
  }
  if (sys.whites_.size() != sys.blacks_.size()) {
    std::ostringstream os;
    os << sys.whites_.size() << " white vs " << sys.blacks_.size()
       << " black squares";
    throw Error(ErrorCode::kUnbalancedRegion, os.str());
  }
  sys.white_set_ = SquareSet(sys.whites_);
  sys.black_set_ = SquareSet(sys.blacks_);
  const int n = sys.size();
  sys.adjacency_.resize(n);
  sys.kreal_ = Eigen::MatrixXd::Zero(n, n);
  for (int w = 0; w < n; ++w) {
    const LatticeSquare s = sys.whites_[w];
    const int offsets[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& o : offsets) {
      const int b = sys.black_set_.index({s.i + o[0], s.j + o[1]});
      if (b < 0) continue;
      const double weight = o[1] < 0 ? -1.0 : 1.0;
      sys.adjacency_[w].push_back({b, weight});
      sys.kreal_(w, b) = weight;
    }
  }
  if (n == 0) {
    sys.singular_ = false;
    sys.log_abs_det_ = 0.0;
    return sys;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.kreal_);
  double log_det = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double u = std::abs(lu.matrixLU()(k, k));
    min_pivot = std::min(min_pivot, u);
    log_det += std::log(u);
  }
  sys.singular_ = !(min_pivot > 1e-9) || lu.rcond() < 1e-14;
  if (sys.singular_) {
    sys.log_abs_det_ = -std::numeric_limits<double>::infinity();
  } else {
    sys.log_abs_det_ = log_det;
    sys.inverse_ = lu.inverse();
  }
  return sys;
}

int KasteleynSystem::white_index(LatticeSquare s) const {
  return white_set_.index(s);
}

int KasteleynSystem::black_index(LatticeSquare s) const {
  return black_set_.index(s);
}

double KasteleynSystem::real_weight(int w, int b) const { return kreal_(w, b); }

std::complex<double> KasteleynSystem::weight(int w, int b) const {
  const LatticeSquare ws = whites_[w], bs = blacks_[b];
  if (!adjacent(ws, bs)) return 0.0;
  return ws.j == bs.j ? std::complex<double>(1.0, 0.0)
                      : std::complex<double>(0.0, 1.0);
}

Eigen::MatrixXcd KasteleynSystem::complex_matrix() const {
  const int n = size();
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  for (int w = 0; w < n; ++w) {
    for (const auto& [b, unused] : adjacency_[w]) k(w, b) = weight(w, b);
  }
  return k;
}

const Eigen::MatrixXd& KasteleynSystem::real_inverse() const {
  if (singular_) throw Error(ErrorCode::kUntileable, "region has no tiling");
  return inverse_;
}

std::complex<double> KasteleynSystem::inverse_entry(int b, int w) const {
  return i_power(whites_[w].j - blacks_[b].j) * real_inverse()(b, w);
}

std::uint64_t exact_determinant_magnitude(const KasteleynSystem& system) {
  const int n = system.size();
  if (2 * n > kExactCountLimit) {
    throw Error(ErrorCode::kRegionTooLarge,
                "exact counting is limited to " +
                    std::to_string(kExactCountLimit) + " squares");
  }
  if (n == 0) return 1;
  std::vector<std::vector<GaussInt>> m(n, std::vector<GaussInt>(n));
  for (int w = 0; w < n; ++w) {
    for (int b = 0; b < n; ++b) {
      const auto z = system.weight(w, b);
      m[w][b] = {static_cast<__int128>(z.real()), static_cast<__int128>(z.imag())};
    }
  }
  GaussInt prev{1, 0};
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k].zero()) {
      int r = k + 1;
      while (r < n && m[r][k].zero()) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        m[i][j] = exact_div(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
      }
      m[i][k] = {};
    }
    prev = m[k][k];
  }
  const GaussInt d = m[n - 1][n - 1];
  // det K is a unit times the count, so one component vanishes.
  const __int128 mag = d.re != 0 ? (d.re < 0 ? -d.re : d.re)
                                 : (d.im < 0 ? -d.im : d.im);
  if (d.re != 0 && d.im != 0) {
    throw Error(ErrorCode::kSolverDiverged, "determinant is not a unit multiple");
  }
  return static_cast<std::uint64_t>(mag);
}

TilingCount count_tilings(const KasteleynSystem& system) {
  TilingCount c;
  c.log_count = system.log_abs_det();
  if (2 * system.size() <= kExactCountLimit) {
    c.exact = exact_determinant_magnitude(system);
    c.log_count = *c.exact == 0 ? -std::numeric_limits<double>::infinity()
                                : std::log(static_cast<double>(*c.exact));
  }
  return c;
}

std::vector<Tiling> enumerate_tilings(const PolyominoRegion& region) {
  const SquareSet& set = region.squares();
  if (static_cast<int>(set.size()) > kExactCountLimit) {
    throw Error(ErrorCode::kRegionTooLarge,
                std::to_string(set.size()) + " squares exceed the enumeration "
                "limit of " + std::to_string(kExactCountLimit));
  }
  std::vector<Tiling> out;
  if (set.size() % 2 != 0) return out;
  std::vector<char> covered(set.size(), 0);
  std::vector<Domino> current;
  enumerate_from(set, covered, current, out);
  return out;
}

double edge_probability(const KasteleynSystem& system,
                        const std::vector<Domino>& edges) {
  const int k = static_cast<int>(edges.size());
  std::vector<int> ws(k), bs(k);
  for (int a = 0; a < k; ++a) {
    const Domino& d = edges[a];
    ws[a] = system.white_index(d.white);
    bs[a] = system.black_index(d.black);
    if (!is_white(d.white) || ws[a] < 0 || bs[a] < 0 ||
        !adjacent(d.white, d.black)) {
      std::ostringstream os;
      os << "(" << d.white.i << "," << d.white.j << ")-(" << d.black.i << ","
         << d.black.j << ") is not a white-black pair of adjacent region squares";
      throw Error(ErrorCode::kInvalidEdge, os.str());
    }
    for (int c = 0; c < a; ++c) {
      if (ws[c] == ws[a] || bs[c] == bs[a]) {
        throw Error(ErrorCode::kInvalidEdge, "edges share a square");
      }
    }
  }
  if (k == 0) return 1.0;
  if (system.singular()) throw Error(ErrorCode::kUntileable, "region has no tiling");
  Eigen::MatrixXcd sub(k, k);
  std::complex<double> prod = 1.0;
  for (int a = 0; a < k; ++a) {
    prod *= system.weight(ws[a], bs[a]);
    for (int c = 0; c < k; ++c) sub(a, c) = system.inverse_entry(bs[a], ws[c]);
  }
  return std::abs(prod * sub.determinant());
}

ConditionedInverse::ConditionedInverse(const KasteleynSystem& system)
    : system_(&system),
      m_(system.real_inverse()),
      white_used_(system.size(), 0),
      black_used_(system.size(), 0) {}

double ConditionedInverse::probability(int w, int b) const {
  if (white_used_[w] || black_used_[b]) return 0.0;
  return system_->real_weight(w, b) * m_(b, w);
}

void ConditionedInverse::place(int w, int b) {
  const double pivot = m_(b, w);
  if (pivot == 0.0 || white_used_[w] || black_used_[b]) {
    throw Error(ErrorCode::kInvalidEdge, "domino has zero conditional probability");
  }
  const Eigen::VectorXd col = m_.col(w);
  const Eigen::RowVectorXd row = m_.row(b) / pivot;
  m_.noalias() -= col * row;
  white_used_[w] = black_used_[b] = 1;
}

}  // namespace dimerhole
