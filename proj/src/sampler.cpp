#include "dimerhole/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

constexpr int kPanel = 32;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index into `p` drawn with probability proportional to max(p, 0).
int draw(const std::array<double, 4>& p, int count, double u) {
  double total = 0.0;
  for (int k = 0; k < count; ++k) total += std::max(p[k], 0.0);
  const double target = u * total;
  double acc = 0.0;
  int last = -1;
  for (int k = 0; k < count; ++k) {
    if (p[k] <= 0.0) continue;
    acc += p[k];
    last = k;
    if (target < acc) return k;
  }
  return last;
}

Tiling make_tiling(const KasteleynSystem& sys, const std::vector<int>& match) {
  Tiling t;
  t.dominoes.reserve(match.size());
  for (std::size_t w = 0; w < match.size(); ++w) {
    t.dominoes.push_back({sys.white_order()[w], sys.black_order()[match[w]]});
  }
  t.normalize();
  return t;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL));
}

Tiling sample_exact_reference(const KasteleynSystem& sys, std::uint64_t seed) {
  if (sys.singular()) throw Error(ErrorCode::kUntileable, "region has no tiling");
  std::mt19937_64 rng(seed);
  ConditionedInverse inv(sys);
  const int n = sys.size();
  std::vector<int> match(n, -1);
  for (int w = 0; w < n; ++w) {
    const auto& nb = sys.neighbours(w);
    std::array<double, 4> p{};
    for (std::size_t k = 0; k < nb.size(); ++k) p[k] = inv.probability(w, nb[k].first);
    const int k = draw(p, static_cast<int>(nb.size()), uniform01(rng));
    if (k < 0) throw Error(ErrorCode::kSolverDiverged, "no admissible domino");
    match[w] = nb[k].first;
    inv.place(w, match[w]);
  }
  return make_tiling(sys, match);
}

Tiling sample_exact(const KasteleynSystem& sys, std::uint64_t seed) {
  if (sys.singular()) throw Error(ErrorCode::kUntileable, "region has no tiling");
  const int n = sys.size();
  std::mt19937_64 rng(seed);
  // Rows of m are blacks (permuted as they get matched: rows < w hold the
  // blacks already used), columns are whites in sampling order.
  Eigen::MatrixXd m = sys.real_inverse();
  std::vector<int> black_at(n), row_of(n);
  for (int k = 0; k < n; ++k) black_at[k] = row_of[k] = k;
  std::vector<int> match(n, -1);
  std::vector<char> used(n, 0);
  std::vector<int> local_of(n, -1);
  int refreshed_at = -1;

  int c0 = 0;
  while (c0 < n) {
    const int c1 = std::min(n, c0 + kPanel);
    const int width = c1 - c0;
    std::vector<int> rows;
    for (int w = c0; w < c1; ++w) {
      for (const auto& [b, unused] : sys.neighbours(w)) {
        if (!used[b] && local_of[b] < 0) {
          local_of[b] = static_cast<int>(rows.size());
          rows.push_back(b);
        }
      }
    }
    Eigen::MatrixXd local(rows.size(), width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      local.row(r) = m.block(row_of[rows[r]], c0, 1, width);
    }

    bool restart = false;
    for (int w = c0; w < c1; ++w) {
      const int c = w - c0;
      const auto& nb = sys.neighbours(w);
      std::array<double, 4> p{};
      double sum = 0.0, low = 0.0;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const int b = nb[k].first;
        p[k] = used[b] ? 0.0 : nb[k].second * local(local_of[b], c);
        sum += p[k];
        low = std::min(low, p[k]);
      }
      if (std::abs(sum - 1.0) > 1e-6 || low < -1e-9) {
        if (refreshed_at == w) {
          throw Error(ErrorCode::kSolverDiverged,
                      "conditional probabilities do not sum to one");
        }
        // Rebuild the inverse of the remaining submatrix from scratch.
        const int rest = n - w;
        Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(rest, rest);
        for (int ww = w; ww < n; ++ww) {
          for (const auto& [b, weight] : sys.neighbours(ww)) {
            if (!used[b]) sub(ww - w, row_of[b] - w) = weight;
          }
        }
        m.block(w, w, rest, rest) = sub.partialPivLu().inverse();
        refreshed_at = w;
        c0 = w;
        restart = true;
        break;
      }
      const int k = draw(p, static_cast<int>(nb.size()), uniform01(rng));
      const int b = nb[k].first;
      match[w] = b;
      used[b] = 1;
      // Move the matched black to physical row w.
      const int rb = row_of[b];
      if (rb != w) {
        m.row(rb).swap(m.row(w));
        const int other = black_at[w];
        black_at[w] = b;
        black_at[rb] = other;
        row_of[b] = w;
        row_of[other] = rb;
      }
      const int lb = local_of[b];
      const int tail = width - c - 1;
      if (tail > 0) {
        const double pivot = local(lb, c);
        const Eigen::RowVectorXd r = local.block(lb, c + 1, 1, tail) / pivot;
        local.rightCols(tail).noalias() -= local.col(c) * r;
      }
    }
    for (int b : rows) local_of[b] = -1;
    if (restart) continue;

    const int rest = n - c1;
    if (rest > 0) {
      const Eigen::MatrixXd x =
          m.block(c0, c0, width, width).partialPivLu().solve(
              m.block(c0, c1, width, rest));
      m.block(c1, c1, rest, rest).noalias() -= m.block(c1, c0, rest, width) * x;
    }
    c0 = c1;
  }
  return make_tiling(sys, match);
}

std::vector<Tiling> sample_many(const KasteleynSystem& system,
                                std::uint64_t master_seed, std::size_t first,
                                std::size_t count, int threads) {
  std::vector<Tiling> out(count);
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  auto work = [&](int t) {
    for (std::size_t k = t; k < count; k += workers) {
      out[k] = sample_exact(system, derive_seed(master_seed, first + k));
    }
  };
  if (workers == 1) {
    work(0);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        work(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace dimerhole
