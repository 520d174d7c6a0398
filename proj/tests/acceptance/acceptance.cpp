// Acceptance run: one PASS/FAIL line per criterion AC1..AC10.
//   acceptance [--fast] [--out DIR]
// --fast replaces the two N = 2000 Monte Carlo gates by their smoke versions.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "dimerhole/config.hpp"
#include "dimerhole/dgauss.hpp"
#include "dimerhole/error.hpp"
#include "dimerhole/experiment.hpp"
#include "dimerhole/harmonic.hpp"
#include "dimerhole/height.hpp"
#include "dimerhole/kasteleyn.hpp"
#include "dimerhole/region.hpp"
#include "dimerhole/riemann.hpp"
#include "dimerhole/sampler.hpp"
#include "dimerhole/stats.hpp"
#include "dimerhole/verify.hpp"

using namespace dimerhole;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string config_path(const std::string& name) {
  return std::string(DIMERHOLE_SOURCE_DIR) + "/configs/" + name;
}

std::vector<LatticeSquare> rect(int w, int h, int i0 = 0, int j0 = 0) {
  std::vector<LatticeSquare> out;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) out.push_back({i0 + i, j0 + j});
  }
  return out;
}

std::vector<LatticeSquare> minus(std::vector<LatticeSquare> a, const std::vector<LatticeSquare>& b) {
  std::erase_if(a, [&](const LatticeSquare& s) { return std::find(b.begin(), b.end(), s) != b.end(); });
  return a;
}

DomainSpec circular_annulus(double r, double phi = 0.0) {
  DomainSpec s;
  s.outer = Circle{{0, 0}, 1.0};
  s.holes.push_back(Circle{{0, 0}, r});
  s.marked_points = {{1, 0}, {r * std::cos(phi), r * std::sin(phi)}};
  return s;
}

DomainSpec two_holes() {
  DomainSpec s;
  s.outer = RectilinearPolygon::rectangle(0, 0, 4, 2);
  s.holes.push_back(RectilinearPolygon::rectangle(0.8, 0.7, 1.4, 1.3));
  s.holes.push_back(RectilinearPolygon::rectangle(2.6, 0.7, 3.2, 1.3));
  s.marked_points = {{2, 0}, {1.1, 0.7}, {2.9, 0.7}};
  return s;
}

Eigen::MatrixXcd random_period(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::MatrixXd a(g, g), x(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      a(i, j) = u(rng);
      x(i, j) = u(rng);
    }
  }
  const Eigen::MatrixXd y = a * a.transpose() + 0.6 * Eigen::MatrixXd::Identity(g, g);
  const Eigen::MatrixXd xs = 0.5 * (x + x.transpose());
  return xs.cast<std::complex<double>>() + kI * y.cast<std::complex<double>>();
}

// Random simply connected balanced polyomino grown square by square.
std::vector<LatticeSquare> random_polyomino(int size, std::mt19937_64& rng) {
  while (true) {
    std::set<LatticeSquare> cells{{0, 0}};
    while (static_cast<int>(cells.size()) < size) {
      std::vector<LatticeSquare> frontier;
      for (const auto& c : cells) {
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          const LatticeSquare n{c.i + di, c.j + dj};
          if (!cells.count(n)) frontier.push_back(n);
        }
      }
      cells.insert(frontier[rng() % frontier.size()]);
    }
    std::vector<LatticeSquare> v(cells.begin(), cells.end());
    int white = 0;
    for (const auto& s : v) white += is_white(s);
    if (2 * white == size && trace_boundary(SquareSet(v)).size() == 1) return v;
  }
}

Outcome ac1() {
  std::vector<std::pair<std::vector<LatticeSquare>, long long>> cases;
  // 2 x n strips: Fibonacci numbers.
  const long long fib[] = {1, 2, 3, 5, 8};
  for (int n = 1; n <= 5; ++n) cases.push_back({rect(n, 2), fib[n - 1]});
  cases.push_back({minus(rect(3, 3), {{2, 2}}), 4});
  cases.push_back({rect(4, 4), 36});
  cases.push_back({rect(6, 4), 281});
  cases.push_back({minus(rect(4, 4), rect(2, 2, 1, 1)), -1});
  cases.push_back({minus(rect(6, 4), rect(2, 2, 2, 1)), -1});
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 16; ++k) cases.push_back({random_polyomino(8 + 2 * (k % 9), rng), -1});
  int mismatches = 0, tileable = 0;
  for (const auto& [squares, known] : cases) {
    const auto region = PolyominoRegion::from_squares(squares);
    const auto det = exact_determinant_magnitude(KasteleynSystem::build(region));
    const auto n = enumerate_tilings(region).size();
    if (det != n || (known >= 0 && static_cast<long long>(n) != known)) ++mismatches;
    tileable += n > 0;
  }
  return {mismatches == 0, std::to_string(cases.size()) + " regions (" +
                               std::to_string(tileable) + " tileable), " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome ac2() {
  const std::vector<std::vector<LatticeSquare>> regions = {
      rect(4, 4), rect(3, 4), minus(rect(6, 4), rect(2, 2, 2, 1))};
  double worst = 1.0;
  std::string sizes;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto region = PolyominoRegion::from_squares(regions[r]);
    const auto all = enumerate_tilings(region);
    std::map<std::string, int> index;
    for (std::size_t t = 0; t < all.size(); ++t) index[all[t].to_text()] = static_cast<int>(t);
    const auto system = KasteleynSystem::build(region);
    std::vector<double> counts(all.size(), 0.0);
    for (const auto& t : sample_many(system, 1000 + r, 0, 20000, 1)) counts[index.at(t.to_text())] += 1;
    const auto chi = chi_square_test(counts, std::vector<double>(all.size(), 1.0 / all.size()));
    worst = std::min(worst, chi.p_value);
    sizes += (r ? "/" : "") + std::to_string(all.size());
  }
  return {worst > 1e-3, "2e4 samples on regions with " + sizes + " tilings, min p " + fmt("%.3g", worst)};
}

Outcome ac3() {
  // The coarser scale of the full annulus run, large enough for the hole
  // height to vary.
  const auto cfg = load_config(config_path("annulus.json"));
  const auto region = build_temperleyan(cfg.domain, cfg.scales[0]);
  const auto system = KasteleynSystem::build(region);
  const HeightLattice lattice(region);
  const auto tilings = sample_many(system, 33, 0, 1000, 1);
  const int nv = static_cast<int>(lattice.vertices().size());
  std::vector<int> loop(nv), loop_ref(region.genus() + 1, -1);
  for (int v = 0; v < nv; ++v) {
    loop[v] = region.loop_of(lattice.vertices()[v]);
    if (loop[v] >= 0 && loop_ref[loop[v]] < 0) loop_ref[loop[v]] = v;
  }
  long long face_violations = 0, boundary_violations = 0, mod4_violations = 0;
  std::set<int> hole_values;
  HeightField first;
  for (std::size_t s = 0; s < tilings.size(); ++s) {
    for (int x : face_sums(lattice, tilings[s])) face_violations += x != 0;
    const HeightField h = height_field(lattice, tilings[s]);
    if (s == 0) first = h;
    for (int v = 0; v < nv; ++v) {
      mod4_violations += ((h.values[v] - first.values[v]) % 4) != 0;
      if (loop[v] < 0) continue;
      // Along each loop the heights are fixed up to the loop's own offset,
      // which is 0 on the outer loop.
      const int ref = loop_ref[loop[v]];
      const int d = h.values[v] - (loop[v] == 0 ? 0 : h.values[ref]);
      const int d0 = first.values[v] - (loop[v] == 0 ? 0 : first.values[ref]);
      boundary_violations += d != d0;
    }
    if (region.genus() >= 1) hole_values.insert(h.values[loop_ref[1]]);
  }
  return {face_violations == 0 && boundary_violations == 0 && mod4_violations == 0 &&
              region.genus() == 1,
          "1000 samples, genus 1, " + std::to_string(system.size()) + " white squares, " +
              std::to_string(hole_values.size()) +
              " distinct hole heights; violations face " + std::to_string(face_violations) +
              ", boundary " + std::to_string(boundary_violations) + ", mod 4 " +
              std::to_string(mod4_violations)};
}

Outcome ac4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_int_distribution<int> shift(-2, 2);
  double qp = 0.0, fd_err = 0.0;
  for (int g = 1; g <= 3; ++g) {
    for (int draw = 0; draw < 100; ++draw) {
      const Eigen::MatrixXcd b = random_period(g, rng);
      const Theta th(b);
      Eigen::VectorXd w(g);
      for (int k = 0; k < g; ++k) w[k] = u(rng);
      const Eigen::VectorXd imz = b.imag() * w;
      Eigen::VectorXcd z(g), m(g), n(g);
      for (int k = 0; k < g; ++k) {
        z[k] = {u(rng), imz[k]};
        m[k] = shift(rng);
        n[k] = shift(rng);
      }
      // theta(z + m + B n) = exp(-pi i n.B n - 2 pi i n.z) theta(z)
      const auto lhs = th(z + m + b * n);
      const auto rhs = std::exp(-kI * kPi * n.dot(b * n) - 2.0 * kI * kPi * n.dot(z)) * th(z);
      qp = std::max(qp, std::abs(lhs - rhs) / std::abs(rhs));
    }
    const Theta th(random_period(g, rng));
    Eigen::VectorXcd z(g);
    for (int k = 0; k < g; ++k) z[k] = {0.8 * u(rng), 0.8 * u(rng)};
    for (int order = 1; order <= 4; ++order) {
      for (int k = 0; k < g; ++k) {
        std::vector<int> lower(g, 0), alpha(g, 0);
        lower[k] = order - 1;
        alpha[k] = order;
        const double step = 1e-3;
        auto at = [&](double t) {
          Eigen::VectorXcd p = z;
          p[k] += t;
          return th(p, lower);
        };
        const auto fd = (-at(2 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2 * step)) /
                        (12.0 * step);
        const auto exact = th(z, alpha);
        fd_err = std::max(fd_err, std::abs(fd - exact) / std::abs(exact));
      }
    }
  }
  return {qp < 1e-10 && fd_err < 1e-6, "quasi-periodicity residual " + fmt("%.2e", qp) +
                                           " (300 draws), derivative rel. error " +
                                           fmt("%.2e", fd_err)};
}

Outcome ac5() {
  const double r = std::exp(-kPi);
  HarmonicSolver annulus(circular_annulus(r), 2.0 / 512);
  const auto sa = surface_data(annulus.harmonic_measures());
  const double tau = sa.tau(0, 0);
  const auto b = sa.period_matrix(0, 0);
  auto modular = [](const SurfaceData& s) {
    const Eigen::MatrixXcd ib = kI * s.period_matrix.inverse();
    return (ib - s.tau.cast<std::complex<double>>()).norm() / s.tau.norm();
  };
  const double ma = modular(sa);
  HarmonicSolver g2(two_holes(), 4.0 / 512);
  const auto s2 = surface_data(g2.harmonic_measures());
  const double m2 = modular(s2);
  const bool pass = std::abs(tau - 1.0) < 1e-2 && std::abs(b - kI) < 2e-2 && ma < 1e-2 && m2 < 1e-2;
  return {pass, "annulus r = e^-pi: tau " + fmt("%.5f", tau) + ", B " + fmt("%.5f", b.real()) +
                    fmt("%+.5fi", b.imag()) + ", |iB^-1 - tau|/|tau| " + fmt("%.1e", ma) +
                    "; genus 2: " + fmt("%.1e", m2)};
}

Outcome ac6() {
  double aligned = 0.0, rotated = 0.0, residual = 0.0, imag = 0.0;
  for (double phi : {0.0, 0.7, 2.5, -1.9}) {
    HarmonicSolver solver(circular_annulus(std::exp(-kPi), phi), 2.0 / 512);
    auto s = surface_data(solver.harmonic_measures());
    const auto shift = compute_shift(s);
    double expect = 0.5 - phi / (2 * kPi);
    expect -= std::floor(expect);
    double d = std::abs(shift.e[0] - expect);
    d = std::min(d, 1.0 - d);
    (phi == 0.0 ? aligned : rotated) = std::max(phi == 0.0 ? aligned : rotated, d);
    imag = std::max(imag, shift.max_imag);
    residual = std::max(residual, zero_divisor_residual(Theta(s.period_matrix), s, shift.e).maxCoeff());
  }
  // Every shipped domain with holes, in the continuum and on its lattice at
  // every configured scale.
  int domains = 0;
  for (const auto& entry : fs::directory_iterator(std::string(DIMERHOLE_SOURCE_DIR) + "/configs")) {
    const auto cfg = load_config(entry.path().string());
    if (cfg.domain.genus() == 0) continue;
    std::vector<DomainSpec> doms{cfg.domain};
    for (double eps : cfg.scales) doms.push_back(lattice_domain(build_temperleyan(cfg.domain, eps)));
    for (const auto& d : doms) {
      const Box box = d.bounding_box();
      HarmonicSolver solver(d, std::max(box.xmax - box.xmin, box.ymax - box.ymin) / cfg.mesh_cells);
      auto s = surface_data(solver.harmonic_measures());
      const auto shift = compute_shift(s, 1.0);
      imag = std::max(imag, shift.max_imag);
      residual = std::max(residual, zero_divisor_residual(Theta(s.period_matrix), s, shift.e).maxCoeff());
      ++domains;
    }
  }
  const bool pass = aligned < 1e-2 && rotated < 1e-2 && residual < 1e-2 && imag < 1e-3;
  return {pass, "aligned |e - 1/2| " + fmt("%.1e", aligned) + ", rotated law error " +
                    fmt("%.1e", rotated) + ", zero-divisor residual " + fmt("%.1e", residual) +
                    " over " + std::to_string(domains + 4) + " domains, max |Im e| " +
                    fmt("%.1e", imag)};
}

Outcome ac7() {
  double worst = 0.0;
  int checks = 0;
  auto compare = [&](const Eigen::MatrixXd& tau, const Eigen::VectorXd& e) {
    const DiscreteGaussian law(tau, e);
    const Eigen::MatrixXcd b = kI * tau.inverse().cast<std::complex<double>>();
    const int g = static_cast<int>(tau.rows());
    const double var = law.covariance().diagonal().maxCoeff();
    // Every multi-index of total order 2..4.
    std::vector<int> alpha(g, 0);
    while (true) {
      int i = 0;
      while (i < g && ++alpha[i] > 4) alpha[i++] = 0;
      if (i == g) break;
      const int k = std::accumulate(alpha.begin(), alpha.end(), 0);
      if (k < 2 || k > 4) continue;
      const double direct = law.cumulant(alpha);
      const double theta = cumulant_via_theta(b, e, alpha);
      worst = std::max(worst, std::abs(direct - theta) /
                                  std::max(std::abs(direct), std::pow(var, k / 2.0)));
      ++checks;
    }
  };
  for (double t : {0.5, 1.0, 2.0}) {
    for (double e : {0.0, 0.2, 0.5}) {
      compare(Eigen::MatrixXd::Constant(1, 1, t), Eigen::VectorXd::Constant(1, e));
    }
  }
  Eigen::MatrixXd tau2(2, 2);
  tau2 << 1.1, -0.3, -0.3, 0.8;
  Eigen::VectorXd e2(2);
  e2 << 0.3, 0.65;
  compare(tau2, e2);
  return {worst < 1e-6, std::to_string(checks) + " cumulants (g = 1 grid and g = 2), max rel. diff " +
                            fmt("%.1e", worst)};
}

Outcome ac8() {
  const DomainSpec spec = circular_annulus(0.3, 0.4);
  const std::vector<std::pair<Point, Point>> pairs{{{0.6, 0.1}, {-0.2, 0.55}},
                                                   {{-0.5, -0.4}, {0.35, -0.6}}};
  std::vector<QueryWindow> q;
  for (const auto& [a, c] : pairs) {
    q.push_back({a, 0});
    q.push_back({c, 0});
  }
  const auto b = predict(spec, q, 2.0 / 512);
  double worst = 0.0;
  for (int p = 0; p < 2; ++p) {
    const auto c = contour_covariance_k2(b.fields, b.surface, b.e[0], pairs[p].first, pairs[p].second);
    const double pred = predicted_covariance(b, 2 * p, 2 * p + 1, true);
    worst = std::max(worst, std::abs(c.value - pred) / std::abs(pred));
  }
  return {worst < 1e-3, "2 point pairs, max rel. diff " + fmt("%.2e", worst)};
}

Outcome ac9(const fs::path& out, bool fast) {
  auto cfg = load_config(config_path("square.json"));
  if (fast) {
    cfg.samples = 500;
    cfg.gates.min_moment_samples = 500;
  }
  RunOptions o;
  o.output_dir = (out / "square").string();
  const auto r = run_experiment(cfg, o);
  const auto& m = r.scales.at(0).moments;
  const auto& var = m.find("var[0]");
  const auto& third = m.find("third[0]");
  const auto& wick = m.find("wick[0]");
  const bool pass = std::abs(var.z) <= 4 && std::abs(third.z) <= 4 && std::abs(wick.z) <= 4;
  return {pass, std::string(fast ? "smoke, " : "") + "N = " + std::to_string(m.samples) + ", " +
                    std::to_string(r.scales[0].whites) + " white squares; z var " +
                    fmt("%.2f", var.z) + " (" + fmt("%.4f", var.empirical) + " vs " +
                    fmt("%.4f", var.predicted) + "), third " + fmt("%.2f", third.z) +
                    ", Wick " + fmt("%.2f", wick.z)};
}

Outcome ac10(const fs::path& out, bool fast) {
  const auto cfg = load_config(config_path(fast ? "annulus_smoke.json" : "annulus.json"));
  const double tv_gate = fast ? 0.15 : 0.05;
  RunOptions o;
  o.output_dir = (out / (fast ? "annulus_smoke" : "annulus")).string();
  const auto r = run_experiment(cfg, o);
  const auto finest = std::min_element(r.scales.begin(), r.scales.end(),
                                       [](const auto& a, const auto& b) { return a.eps < b.eps; });
  const GofReport& gof = *finest->gof;
  const double corr_gate = 4.0 / std::sqrt(static_cast<double>(cfg.samples));
  double corr = 0.0;
  for (std::size_t i = 0; i < cfg.queries.size(); ++i) {
    corr = std::max(corr, std::abs(finest->moments.find("corr[Z1," + std::to_string(i) + "]").empirical));
  }
  const bool trend = r.variance_trend.value_or(false);
  const bool pass = gof.total_variation < tv_gate && gof.p_value > 1e-3 && gof.support_ok &&
                    cfg.queries.size() >= 2 && corr < corr_gate && trend;
  return {pass, std::string(fast ? "smoke, " : "") + "N = " + std::to_string(cfg.samples) +
                    ", eps " + format_double(finest->eps) + ": TV " +
                    fmt("%.4f", gof.total_variation) + " (gate " + fmt("%.2f", tv_gate) +
                    "), p " + fmt("%.3g", gof.p_value) + ", max |corr| " + fmt("%.4f", corr) +
                    " (gate " + fmt("%.4f", corr_gate) + "), Var gap " +
                    fmt("%.4f", r.scales.front().variance_gap) + " -> " +
                    fmt("%.4f", r.scales.back().variance_gap) + (trend ? " shrinks" : " grows") +
                    ", TV " + (r.tv_trend.value_or(false) ? "shrinks" : "grows")};
}

}  // namespace

int main(int argc, char** argv) {
  bool fast = false;
  fs::path out = "acceptance_out";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--fast") fast = true;
    else if (a == "--out" && i + 1 < argc) out = argv[++i];
    else {
      std::fprintf(stderr, "usage: %s [--fast] [--out DIR]\n", argv[0]);
      return 2;
    }
  }
  struct Criterion {
    const char* id;
    const char* name;
    double limit_s;  // runtime budget; 0 when none is pinned
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "oracle counting", 60, ac1},
      {"AC2", "sampler uniformity", 300, ac2},
      {"AC3", "height rigidity", 300, ac3},
      {"AC4", "theta identities", 60, ac4},
      {"AC5", "surface-data consistency", 300, ac5},
      {"AC6", "shift and zero divisor", 300, ac6},
      {"AC7", "dual-route cumulants", 60, ac7},
      {"AC8", "genus-1 contour identity", 120, ac8},
      {"AC9", "GFF gate", fast ? 300 : 0, [&] { return ac9(out, fast); }},
      {"AC10", "discrete Gaussian gate", fast ? 300 : 0, [&] { return ac10(out, fast); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_s) + " s budget";
    }
    failed += !o.pass;
    std::printf("%-4s %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
