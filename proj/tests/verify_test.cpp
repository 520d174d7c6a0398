#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dimerhole/error.hpp"
#include "dimerhole/region.hpp"
#include "dimerhole/sampler.hpp"
#include "dimerhole/verify.hpp"

using namespace dimerhole;

namespace {

constexpr double kPi = std::numbers::pi;

// Dirichlet Green's function of -Laplace on [0,a]x[0,b] by its sine series in
// x; each term is the 1-D resolvent in y.
double rectangle_green(double a, double b, Point p, Point q) {
  const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
  double sum = 0.0;
  for (int m = 1; m < 20000; ++m) {
    const double k = m * kPi / a;
    // sinh(k lo) sinh(k (b - hi)) / sinh(k b), written with decaying exponentials.
    const double ratio = 0.5 * std::exp(k * (lo - hi)) * (1 - std::exp(-2 * k * lo)) *
                         (1 - std::exp(-2 * k * (b - hi))) / (1 - std::exp(-2 * k * b));
    sum += 2.0 / a * std::sin(k * p.x) * std::sin(k * q.x) * ratio / k;
  }
  return sum;
}

DomainSpec unit_square() {
  DomainSpec s;
  s.outer = RectilinearPolygon::rectangle(0, 0, 1, 1);
  s.marked_points = {{0.5, 0}};
  return s;
}

DomainSpec circular_annulus(double r, double phi) {
  DomainSpec s;
  s.outer = Circle{{0, 0}, 1.0};
  s.holes.push_back(Circle{{0, 0}, r});
  s.marked_points = {{1, 0}, {r * std::cos(phi), r * std::sin(phi)}};
  return s;
}

template <class F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Predict, SquareGreensAgainstSeries) {
  const auto b = predict(unit_square(), {{{0.5, 0.5}, 0.1}, {{0.2, 0.3}, 0.05}, {{0.8, 0.7}, 0}},
                         1.0 / 256);
  EXPECT_EQ(b.genus(), 0);
  EXPECT_NEAR(b.greens(0, 1), rectangle_green(1, 1, {0.5, 0.5}, {0.2, 0.3}), 2e-4);
  EXPECT_NEAR(b.greens(1, 2), rectangle_green(1, 1, {0.2, 0.3}, {0.8, 0.7}), 2e-4);
  EXPECT_EQ(b.greens(0, 1), b.greens(1, 0));
  EXPECT_TRUE(std::isinf(b.greens(2, 2)));
  // Disk self-energy: regular part at the centre plus the log-potential of
  // the uniform disk. The series regular part comes from a nearby pair; it
  // is stationary at the centre, so the offset costs O(d^2).
  const double rho = 0.1, d = 1e-2;
  const double series_regular =
      rectangle_green(1, 1, {0.5, 0.5}, {0.5, 0.5 + d}) + std::log(d) / (2 * kPi);
  EXPECT_NEAR(b.greens(0, 0), series_regular - (std::log(rho) - 0.25) / (2 * kPi), 1e-3);
  EXPECT_NEAR(predicted_covariance(b, 0, 1), 16 / kPi * b.greens(0, 1), 1e-15);
  EXPECT_NEAR(predicted_fourth_moment(b, 0, 0, 0, 0),
              3 * std::pow(predicted_covariance(b, 0, 0), 2), 1e-12);
  // Positive semidefinite on the finite windows.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.greens.topLeftCorner(2, 2));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Predict, BoundaryQueriesAndErrors) {
  const double r = 0.3;
  const auto b =
      predict(circular_annulus(r, 0.4), {{{r, 0.0}, 0}, {{0.6, 0.2}, 0.1}}, 2.0 / 256);
  EXPECT_EQ(b.greens(0, 1), 0.0);
  EXPECT_EQ(b.harmonic(0, 0), 1.0);
  // On A_1 the uncorrected covariance reduces to 16 f(z) Var(X).
  EXPECT_NEAR(predicted_covariance(b, 0, 1, true), 16 * b.harmonic(1, 0) * b.x_covariance(0, 0),
              1e-12);
  EXPECT_GT(b.x_covariance(0, 0), 0.0);
  expect_error(ErrorCode::kCoincidentPoints, [&] {
    predict(unit_square(), {{{0.5, 0.5}, 0.1}, {{0.6, 0.5}, 0.05}}, 1.0 / 64);
  });
  expect_error(ErrorCode::kSourceTooCloseToBoundary,
               [&] { predict(unit_square(), {{{0.5, 0.05}, 0.1}}, 1.0 / 64); });
}

TEST(ContourCovariance, MatchesGreensDecomposition) {
  const double r = 0.3;
  const DomainSpec spec = circular_annulus(r, 0.9);
  const std::vector<std::pair<Point, Point>> pairs{{{0.5, 0.2}, {-0.3, 0.6}},
                                                   {{0.7, -0.1}, {0.1, -0.5}}};
  std::vector<QueryWindow> q;
  for (const auto& [a, c] : pairs) {
    q.push_back({a, 0});
    q.push_back({c, 0});
  }
  const auto b = predict(spec, q, 2.0 / 512);
  for (int p = 0; p < 2; ++p) {
    const auto [z1, z2] = pairs[p];
    const auto c = contour_covariance_k2(b.fields, b.surface, b.e[0], z1, z2);
    const double pred = predicted_covariance(b, 2 * p, 2 * p + 1, true);
    EXPECT_LT(std::abs(c.value - pred), 1e-3 * std::abs(pred)) << p;
    EXPECT_LT(std::abs(c.imag), 1e-8);
    const auto swapped = contour_covariance_k2(b.fields, b.surface, b.e[0], z2, z1);
    EXPECT_NEAR(swapped.value, c.value, 1e-8);
  }
  // Points on one ray from the centre share the chart's real part.
  expect_error(ErrorCode::kPathsIntersect, [&] {
    contour_covariance_k2(b.fields, b.surface, b.e[0], {0.5, 0.0}, {0.8, 0.0});
  });
}

TEST(MomentSuite, GaussianNullAndDetection) {
  const auto b = predict(unit_square(), {{{0.5, 0.5}, 0.15}, {{0.25, 0.3}, 0.1}}, 1.0 / 128);
  Eigen::Matrix2d cov;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) cov(i, j) = predicted_covariance(b, i, j);
  }
  const Eigen::Matrix2d l = cov.llt().matrixL();
  auto draw = [&](double inflate, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<SampleRecord> out(n);
    for (auto& r : out) {
      const Eigen::Vector2d x = std::sqrt(inflate) * l * Eigen::Vector2d(nd(rng), nd(rng));
      r.centered = {x[0], x[1]};
      r.uncentered = r.centered;
    }
    return out;
  };
  const auto ok = moment_suite(draw(1.0, 2000, 3), b);
  EXPECT_TRUE(ok.pass()) << ok.table();
  EXPECT_NEAR(ok.find("var[0]").predicted, 16 / kPi * b.greens(0, 0), 1e-12);
  const auto bad = moment_suite(draw(1.3, 2000, 3), b);
  EXPECT_FALSE(bad.find("var[0]").pass);
  expect_error(ErrorCode::kInsufficientSamples, [&] { moment_suite(draw(1.0, 499, 1), b); });
}

TEST(GofHoleLaw, SelfTestWithDiscreteGaussianSamples) {
  const DiscreteGaussian law(Eigen::MatrixXd::Constant(1, 1, 1.7),
                             Eigen::VectorXd::Constant(1, 0.31));
  const double mean = law.mean()[0];
  std::vector<std::vector<double>> z;
  for (const auto& x : law.sample_many(77, 3000)) z.push_back({4.0 * (x[0] - mean)});
  const auto rep = gof_hole_law(z, law);
  EXPECT_GT(rep.p_value, 1e-3);
  EXPECT_LT(rep.total_variation, 0.05);
  EXPECT_TRUE(rep.support_ok);
  EXPECT_NEAR(rep.offsets[0], 0.0, 1e-12);
  // A law with the wrong scale is rejected.
  const DiscreteGaussian wrong(Eigen::MatrixXd::Constant(1, 1, 0.8),
                               Eigen::VectorXd::Constant(1, 0.31));
  EXPECT_LT(gof_hole_law(z, wrong).p_value, 1e-3);
  z[5][0] += 1.0;
  EXPECT_FALSE(gof_hole_law(z, law).support_ok);
  z.resize(1999);
  expect_error(ErrorCode::kInsufficientSamples, [&] { gof_hole_law(z, law); });
}

TEST(GofHoleLaw, GenusTwoSelfTest) {
  Eigen::MatrixXd tau(2, 2);
  tau << 1.3, -0.4, -0.4, 0.9;
  const DiscreteGaussian law(tau, Eigen::Vector2d(0.2, 0.7));
  std::vector<std::vector<double>> z;
  for (const auto& x : law.sample_many(5, 4000)) {
    z.push_back({4.0 * (x[0] - law.mean()[0]), 4.0 * (x[1] - law.mean()[1])});
  }
  const auto rep = gof_hole_law(z, law);
  EXPECT_GT(rep.p_value, 1e-3);
  EXPECT_TRUE(rep.support_ok);
}

TEST(LatticeRecords, HarmonicOnVerticesAndDecomposition) {
  DomainSpec spec;
  spec.outer = RectilinearPolygon::rectangle(0, 0, 16, 16);
  spec.holes.push_back(RectilinearPolygon::rectangle(6, 6, 10, 10));
  spec.marked_points = {{8, 0}, {6, 8}};
  const auto region = build_temperleyan(spec, 1.0);
  const auto domain = lattice_domain(region);
  const auto bundle = predict(domain, {{{3.5, 3.5}, 1.5}, {{12.5, 12.5}, 0}}, 16.0 / 128);
  const HeightLattice lattice(region);
  const auto f = harmonic_on_vertices(bundle.fields, lattice);
  for (int v : lattice.loop_vertices(1)) EXPECT_EQ(f[0][v], 1.0);
  for (int v : lattice.loop_vertices(0)) EXPECT_EQ(f[0][v], 0.0);
  const auto sys = KasteleynSystem::build(region);
  const auto expected = expected_height_field(sys, lattice);
  std::vector<std::vector<std::pair<int, double>>> windows;
  for (const auto& q : bundle.queries) windows.push_back(window_weights(lattice, q));
  EXPECT_EQ(windows[1].size(), 1u);
  EXPECT_GT(windows[0].size(), 4u);
  for (const auto& t : sample_many(sys, 9, 0, 5, 1)) {
    const auto h = height_field(lattice, t);
    const auto r = record_sample(lattice, h, expected, f, windows);
    ASSERT_EQ(r.z.size(), 1u);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      double fbar = 0.0;
      for (const auto& [v, w] : windows[i]) fbar += w * f[0][v];
      EXPECT_NEAR(r.uncentered[i], r.centered[i] + r.z[0] * fbar, 1e-9);
    }
  }
}
