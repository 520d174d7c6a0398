#include "dimerhole/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dimerhole/error.hpp"
#include "dimerhole/stats.hpp"

namespace dimerhole {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double boundary_distance(const DomainSpec& d, Point p) {
  double out = distance_to_boundary(d.outer, p);
  for (const auto& hole : d.holes) out = std::min(out, distance_to_boundary(hole, p));
  return out;
}

double field_at(const HarmonicField& f, const DomainSpec& d, Point p) {
  if (d.contains(p, 1e-9)) return f.value(p);
  return f.boundary_value(d.nearest_component(p), p);
}

Statistic make_stat(std::string name, double emp, double se, double pred, double gate) {
  Statistic s;
  s.name = std::move(name);
  s.empirical = emp;
  s.standard_error = se;
  s.predicted = pred;
  s.gate = gate;
  s.z = se > 0 ? (emp - pred) / se : (emp == pred ? 0.0 : kInf);
  s.pass = std::abs(s.z) <= gate;
  return s;
}

// Mean of x and its standard error from the sample standard deviation.
std::pair<double, double> mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

}  // namespace

PredictionBundle predict(const DomainSpec& domain, std::vector<QueryWindow> queries,
                         double h) {
  PredictionBundle b;
  b.domain = domain;
  b.queries = std::move(queries);
  const int q = static_cast<int>(b.queries.size());
  const int g = domain.genus();
  HarmonicSolver solver(domain, h);
  b.fields = solver.harmonic_measures();
  b.greens = Eigen::MatrixXd::Zero(q, q);
  b.harmonic = Eigen::MatrixXd::Zero(q, g);
  std::vector<bool> interior(q);
  for (int i = 0; i < q; ++i) {
    const auto& w = b.queries[i];
    interior[i] = domain.contains(w.center, 1e-9);
    if (!interior[i] && w.radius > 0) {
      throw Error(ErrorCode::kSourceTooCloseToBoundary, "window centred on the boundary");
    }
    if (interior[i] && boundary_distance(domain, w.center) <= w.radius) {
      throw Error(ErrorCode::kSourceTooCloseToBoundary, "window leaves the domain");
    }
    for (int j = 0; j < g; ++j) b.harmonic(i, j) = field_at(b.fields[j], domain, w.center);
  }
  for (int i = 0; i < q; ++i) {
    if (!interior[i]) continue;
    const auto green = solver.greens_function(b.queries[i].center);
    const double rho = b.queries[i].radius;
    b.greens(i, i) = rho > 0
        ? green.regular_part().value(b.queries[i].center) - (std::log(rho) - 0.25) / (2 * kPi)
        : kInf;
    for (int j = 0; j < q; ++j) {
      if (j == i || !interior[j]) continue;
      const double sep = norm(b.queries[i].center - b.queries[j].center);
      if (sep <= b.queries[i].radius + b.queries[j].radius) {
        throw Error(ErrorCode::kCoincidentPoints, "query windows overlap");
      }
      b.greens(i, j) = green(b.queries[j].center);
    }
  }
  // Each off-diagonal pair was computed from both sources; average them.
  b.greens = (0.5 * (b.greens + b.greens.transpose())).eval();
  for (int i = 0; i < q; ++i) {
    if (interior[i] && b.queries[i].radius <= 0) b.greens(i, i) = kInf;
  }
  if (g >= 1) {
    b.surface = surface_data(b.fields);
    b.e = compute_shift(b.surface).e;
    b.x_covariance = DiscreteGaussian(b.surface.tau, b.e).covariance();
  } else {
    b.e.resize(0);
    b.x_covariance.resize(0, 0);
  }
  return b;
}

double predicted_covariance(const PredictionBundle& b, int i, int j, bool uncorrected) {
  double out = 16.0 / kPi * b.greens(i, j);
  if (uncorrected && b.genus() > 0) {
    out += 16.0 * b.harmonic.row(i).dot(b.x_covariance * b.harmonic.row(j).transpose());
  }
  return out;
}

double predicted_fourth_moment(const PredictionBundle& b, int i, int j, int k, int l) {
  auto c = [&](int x, int y) { return predicted_covariance(b, x, y); };
  return c(i, j) * c(k, l) + c(i, k) * c(j, l) + c(i, l) * c(j, k);
}

ContourCovariance contour_covariance_k2(const std::vector<HarmonicField>& fields,
                                        const SurfaceData& surface, double e, Point z1,
                                        Point z2) {
  if (surface.genus != 1) {
    throw Error(ErrorCode::kUnsupportedDomain, "contour covariance needs genus 1");
  }
  const TorusChart chart(fields, surface);
  const Theta theta(surface.period_matrix);
  const auto u1 = chart.u(z1), u2 = chart.u(z2);
  const double da = u2.real() - u1.real();
  if (std::abs(da - std::round(da)) < 1e-6) {
    throw Error(ErrorCode::kPathsIntersect, "chart segments overlap");
  }
  const auto slope = theta.odd(0.0, 1);
  const auto te = theta.scalar(e);
  auto kernel = [&](std::complex<double> x) {
    return 16.0 * theta.scalar(x + e) * theta.scalar(e - x) * slope * slope /
           (te * te * theta.odd(x) * theta.odd(x));
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double h1 = u1.imag(), h2 = u2.imag();
  auto part = [&](bool imag) {
    return GK::integrate(
        [&](double t1) {
          return GK::integrate(
              [&](double t2) {
                const auto v = kernel({da, t2 - t1});
                return imag ? v.imag() : v.real();
              },
              -h2, h2, 12, 1e-12);
        },
        -h1, h1, 12, 1e-12);
  };
  return {part(false) / (4 * kPi * kPi), part(true) / (4 * kPi * kPi)};
}

std::vector<std::pair<int, double>> window_weights(const HeightLattice& lattice,
                                                   QueryWindow window) {
  std::vector<int> vs;
  if (window.radius > 0) vs = lattice.window(window.center, window.radius);
  if (vs.empty()) {
    const double scale = lattice.region().scale();
    int best = 0;
    double dist = kInf;
    for (int v = 0; v < static_cast<int>(lattice.vertices().size()); ++v) {
      const double d = norm(vertex_position(lattice.vertices()[v], scale) - window.center);
      if (d < dist) {
        dist = d;
        best = v;
      }
    }
    vs = {best};
  }
  std::vector<std::pair<int, double>> out;
  for (int v : vs) out.emplace_back(v, 1.0 / vs.size());
  return out;
}

std::vector<std::vector<double>> harmonic_on_vertices(
    const std::vector<HarmonicField>& fields, const HeightLattice& lattice) {
  std::vector<std::vector<double>> out;
  const double scale = lattice.region().scale();
  for (const auto& f : fields) {
    const DomainSpec& d = f.mesh().spec;
    std::vector<double> row;
    row.reserve(lattice.vertices().size());
    for (const auto& v : lattice.vertices()) {
      row.push_back(field_at(f, d, vertex_position(v, scale)));
    }
    out.push_back(std::move(row));
  }
  // Region boundary vertices take the boundary data exactly, including the
  // notch of the removed square, so h~ vanishes on every loop.
  const int loops = static_cast<int>(lattice.region().boundary_loops().size());
  for (int k = 0; k < loops; ++k) {
    for (int v : lattice.loop_vertices(k)) {
      for (std::size_t j = 0; j < out.size(); ++j) {
        out[j][v] = static_cast<int>(j) + 1 == k ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

SampleRecord record_sample(const HeightLattice& lattice, const HeightField& h,
                           const ExpectedHeightField& expected,
                           const std::vector<std::vector<double>>& harmonic,
                           const std::vector<std::vector<std::pair<int, double>>>& windows) {
  SampleRecord r;
  r.z = hole_heights(lattice, h, expected);
  for (const auto& w : windows) {
    double raw = 0.0, corr = 0.0;
    for (const auto& [v, weight] : w) {
      const double dh = h.values[v] - expected.values[v];
      double fix = 0.0;
      for (std::size_t j = 0; j < r.z.size(); ++j) fix += r.z[j] * harmonic[j][v];
      raw += weight * dh;
      corr += weight * (dh - fix);
    }
    r.uncentered.push_back(raw);
    r.centered.push_back(corr);
  }
  return r;
}

bool MomentReport::pass() const {
  return std::all_of(stats.begin(), stats.end(), [](const auto& s) { return s.pass; });
}

const Statistic& MomentReport::find(const std::string& name) const {
  for (const auto& s : stats) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kMissingHarmonicData, "no statistic named " + name);
}

std::string MomentReport::table() const {
  std::ostringstream os;
  os << "N = " << samples << "\n";
  os << std::left << std::setw(22) << "statistic" << std::right << std::setw(13) << "empirical"
     << std::setw(12) << "std.err" << std::setw(13) << "predicted" << std::setw(9) << "z"
     << std::setw(7) << "gate" << "  result\n";
  os << std::setprecision(5);
  for (const auto& s : stats) {
    os << std::left << std::setw(22) << s.name << std::right << std::setw(13) << s.empirical
       << std::setw(12) << s.standard_error << std::setw(13) << s.predicted << std::setw(9)
       << std::setprecision(3) << s.z << std::setw(7) << s.gate << std::setprecision(5)
       << "  " << (s.pass ? "pass" : "FAIL") << "\n";
  }
  return os.str();
}

MomentReport moment_suite(const std::vector<SampleRecord>& samples,
                          const PredictionBundle& bundle, const MomentOptions& options) {
  const std::size_t n = samples.size();
  if (n < options.min_samples) {
    throw Error(ErrorCode::kInsufficientSamples,
                "moment suite needs " + std::to_string(options.min_samples) +
                    " samples, got " + std::to_string(n));
  }
  const int q = static_cast<int>(bundle.queries.size());
  const int g = bundle.genus();
  const double gate = options.gate;
  MomentReport rep;
  rep.samples = n;
  auto column = [&](int i, int power) {
    std::vector<double> out(n);
    for (std::size_t s = 0; s < n; ++s) out[s] = std::pow(samples[s].centered[i], power);
    return out;
  };
  for (int i = 0; i < q; ++i) {
    const std::string tag = "[" + std::to_string(i) + "]";
    const auto y = column(i, 1);
    const auto [m1, se1] = mean_se(y);
    rep.stats.push_back(make_stat("mean" + tag, m1, se1, 0.0, gate));
    const auto y2 = column(i, 2);
    const auto [m2, se2] = mean_se(y2);
    if (std::isfinite(bundle.greens(i, i)) && bundle.queries[i].radius > 0) {
      rep.stats.push_back(
          make_stat("var" + tag, m2, se2, predicted_covariance(bundle, i, i), gate));
    }
    const auto [m3, se3] = mean_se(column(i, 3));
    rep.stats.push_back(make_stat("third" + tag, m3, se3, 0.0, gate));
    // Wick: m4 - 3 m2^2, with influence function y^4 - 6 m2 y^2.
    const auto y4 = column(i, 4);
    std::vector<double> infl(n);
    for (std::size_t s = 0; s < n; ++s) infl[s] = y4[s] - 6.0 * m2 * y2[s];
    const double wick = mean_of(y4) - 3.0 * m2 * m2;
    rep.stats.push_back(make_stat("wick" + tag, wick, mean_se(infl).second, 0.0, gate));
  }
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      std::vector<double> prod(n);
      for (std::size_t s = 0; s < n; ++s) {
        prod[s] = samples[s].centered[i] * samples[s].centered[j];
      }
      const auto [m, se] = mean_se(prod);
      rep.stats.push_back(make_stat("cov[" + std::to_string(i) + "," + std::to_string(j) + "]",
                                    m, se, predicted_covariance(bundle, i, j), gate));
    }
  }
  for (int k = 0; k < g; ++k) {
    std::vector<double> zk(n);
    for (std::size_t s = 0; s < n; ++s) zk[s] = samples[s].z[k];
    for (int i = 0; i < q; ++i) {
      const double c = correlation_of(zk, column(i, 1));
      const double se = 1.0 / std::sqrt(static_cast<double>(n));
      rep.stats.push_back(make_stat(
          "corr[Z" + std::to_string(k + 1) + "," + std::to_string(i) + "]", c, se, 0.0, gate));
    }
  }
  return rep;
}

GofReport gof_hole_law(const std::vector<std::vector<double>>& z, const DiscreteGaussian& law,
                       std::size_t min_samples) {
  const int g = law.genus();
  if (g < 1) throw Error(ErrorCode::kInsufficientSamples, "hole law needs genus >= 1");
  if (z.size() < min_samples) {
    throw Error(ErrorCode::kInsufficientSamples,
                "hole-law test needs " + std::to_string(min_samples) + " samples, got " +
                    std::to_string(z.size()));
  }
  GofReport rep;
  rep.samples = z.size();
  rep.support_ok = true;
  rep.offsets = Eigen::VectorXd::Zero(g);
  const Eigen::VectorXd mean = law.mean();
  std::map<std::vector<int>, double> counts;
  for (const auto& row : z) {
    std::vector<int> key(g);
    for (int j = 0; j < g; ++j) {
      const double d = (row[j] - z[0][j]) / 4.0;
      if (std::abs(d - std::round(d)) > 1e-6) rep.support_ok = false;
      key[j] = static_cast<int>(std::lround(row[j] / 4.0 + mean[j]));
    }
    counts[key] += 1.0;
  }
  for (int j = 0; j < g; ++j) {
    const double x = z[0][j] / 4.0 + mean[j];
    rep.offsets[j] = x - std::round(x);
  }
  const double total = static_cast<double>(z.size());
  std::vector<double> observed, expected;
  double tv = 0.0;
  for (std::size_t s = 0; s < law.support().size(); ++s) {
    const Eigen::VectorXi& n = law.support()[s];
    const std::vector<int> key(n.data(), n.data() + g);
    const auto it = counts.find(key);
    const double c = it == counts.end() ? 0.0 : it->second;
    if (it != counts.end()) counts.erase(it);
    observed.push_back(c);
    expected.push_back(law.probabilities()[s]);
    tv += std::abs(c / total - law.probabilities()[s]);
    if (c > 0 || law.probabilities()[s] > 1e-6) {
      rep.cells.push_back({n, c / total, law.probabilities()[s]});
    }
  }
  // Observed values outside the truncated support carry no model mass.
  for (const auto& [key, c] : counts) {
    tv += c / total;
    rep.cells.push_back({Eigen::Map<const Eigen::VectorXi>(key.data(), g), c / total, 0.0});
    observed.push_back(c);
    expected.push_back(0.0);
  }
  rep.total_variation = 0.5 * tv;
  const auto chi = chi_square_test(observed, expected);
  rep.chi_square = chi.statistic;
  rep.dof = chi.dof;
  rep.p_value = chi.p_value;
  return rep;
}

}  // namespace dimerhole
