#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dimerhole/error.hpp"
#include "dimerhole/harmonic.hpp"

using namespace dimerhole;

namespace {

constexpr double kPi = std::numbers::pi;

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

TEST(HarmonicMeasure, RadialAnnulus) {
  HarmonicSolver solver(circular_annulus(0.5), 2.0 / 128);
  const auto f = solver.harmonic_measure(1);
  const double r = std::sqrt(0.5);
  for (double a : {0.0, 0.7, 2.0, 4.4}) {
    EXPECT_NEAR(f.value({r * std::cos(a), r * std::sin(a)}), 0.5, 1e-3);
  }
  EXPECT_NEAR(f.value({0.8, 0.1}), std::log(std::hypot(0.8, 0.1)) / std::log(0.5),
              1e-3);
}

TEST(HarmonicMeasure, BoundaryDataAndMaximumPrinciple) {
  HarmonicSolver solver(two_holes(), 4.0 / 256);
  for (int j = 1; j <= 2; ++j) {
    const auto f = solver.harmonic_measure(j);
    const auto& m = f.mesh();
    for (int u = 0; u < m.size(); ++u) {
      for (const auto& arm : m.arms[u]) {
        if (arm.neighbour >= 0) continue;
        EXPECT_EQ(f.boundary_value(arm.component, arm.end),
                  arm.component == j ? 1.0 : 0.0);
      }
    }
    EXPECT_GE(f.min_value(), 0.0);
    EXPECT_LE(f.max_value(), 1.0);
    EXPECT_LT(f.max_residual(), 1e-8);
  }
}

TEST(GreensFunction, UnitDiskCenter) {
  DomainSpec disk;
  disk.outer = Circle{{0, 0}, 1.0};
  disk.marked_points = {{1, 0}};
  HarmonicSolver solver(disk, 2.0 / 128);
  const auto g = solver.greens_function({0, 0});
  for (double a : {0.3, 1.9, 3.5}) {
    EXPECT_NEAR(g({0.5 * std::cos(a), 0.5 * std::sin(a)}), std::log(2.0) / (2 * kPi),
                1e-3);
  }
  EXPECT_EQ(g({1, 0}), 0.0);
  EXPECT_EQ(g({0, -1}), 0.0);
  // Off-centre source against the image-charge closed form.
  const Point s{0.3, -0.2}, z{-0.4, 0.25};
  const double s2 = s.x * s.x + s.y * s.y;
  const Point img{s.x / s2, s.y / s2};
  const double exact =
      -std::log(norm(z - s) / (norm(z - img) * std::sqrt(s2))) / (2 * kPi);
  EXPECT_NEAR(solver.greens_function(s)(z), exact, 1e-3);
}

TEST(GreensFunction, SymmetryAndPositivity) {
  DomainSpec sq;
  sq.outer = RectilinearPolygon::rectangle(0, 0, 1, 1);
  sq.marked_points = {{0.5, 0}};
  HarmonicSolver solver(sq, 1.0 / 128);
  const Point a{0.3, 0.4}, b{0.7, 0.65}, c{0.2, 0.8};
  const auto ga = solver.greens_function(a);
  const auto gb = solver.greens_function(b);
  const auto gc = solver.greens_function(c);
  EXPECT_NEAR(ga(b), gb(a), 1e-3);
  EXPECT_NEAR(ga(c), gc(a), 1e-3);
  EXPECT_NEAR(gb(c), gc(b), 1e-3);
  EXPECT_GT(ga(b), 0.0);
  EXPECT_EQ(ga({0, 0.5}), 0.0);
  expect_error(ErrorCode::kCoincidentPoints, [&] { ga(a); });
}

TEST(ScaleMatrix, AnnulusClosedForm) {
  const double r = std::exp(-kPi);
  HarmonicSolver solver(circular_annulus(r), 2.0 / 256);
  const auto tau = scale_matrix(solver.harmonic_measures());
  EXPECT_NEAR(tau(0, 0), kPi / std::log(1 / r), 1e-2);
}

TEST(ScaleMatrix, MeshRefinement) {
  const DomainSpec s = circular_annulus(0.3);
  const double exact = kPi / std::log(1 / 0.3);
  double prev_err = 0.0;
  for (int n : {64, 128, 256}) {
    HarmonicSolver solver(s, 2.0 / n);
    const double err = std::abs(scale_matrix(solver.harmonic_measures())(0, 0) - exact);
    if (n > 64) EXPECT_LT(err, 0.75 * prev_err + 1e-5) << n;
    prev_err = err;
  }
}

TEST(ScaleMatrix, GenusTwoSymmetry) {
  HarmonicSolver solver(two_holes(), 4.0 / 256);
  const auto tau = scale_matrix(solver.harmonic_measures());
  EXPECT_EQ(tau(0, 1), tau(1, 0));
  EXPECT_NEAR(tau(0, 0), tau(1, 1), 1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tau);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  EXPECT_LT(tau(0, 1), 0.0);  // harmonic measures of distinct holes compete
}

TEST(ScaleMatrix, MismatchedMeshes) {
  HarmonicSolver a(circular_annulus(0.4), 2.0 / 64);
  HarmonicSolver b(circular_annulus(0.4), 2.0 / 64);
  expect_error(ErrorCode::kMismatchedMeshes, [&] {
    scale_matrix({a.harmonic_measure(1), b.harmonic_measure(1)});
  });
}

TEST(ComplexMeasure, ContractibleLoopAndFluxRoutes) {
  HarmonicSolver solver(circular_annulus(0.3), 2.0 / 256);
  const auto f = solver.harmonic_measure(1);
  // Corners at cell centres, so the sides follow the dual grid.
  const double h = f.mesh().h, x0 = f.mesh().x0, y0 = f.mesh().y0;
  auto c = [&](int i, int j) { return Point{x0 + (i + 0.5) * h, y0 + (j + 0.5) * h}; };
  const Polyline small{c(190, 140), c(220, 140), c(220, 170), c(190, 170), c(190, 140)};
  EXPECT_LT(std::abs(complex_measure_path(f, small)), 1e-6);
  // A tilted loop goes through the gradient quadrature instead.
  const Polyline tilted{{0.5, 0.1}, {0.7, 0.2}, {0.6, 0.4}, {0.5, 0.1}};
  EXPECT_LT(std::abs(complex_measure_path(f, tilted)), 1e-4);
  // Flux of f around the hole: two contours and the Dirichlet energy.
  const auto near = complex_measure_path(f, hole_contour(f.mesh(), 1, 2));
  const auto far = complex_measure_path(f, hole_contour(f.mesh(), 1, 12));
  EXPECT_NEAR(near.imag(), far.imag(), 1e-4);
  EXPECT_NEAR(near.imag(), -2 * kPi / std::log(1 / 0.3), 2e-3);
  EXPECT_EQ(near.real(), 0.0);
}

TEST(ComplexMeasure, PathLeavesDomain) {
  HarmonicSolver solver(circular_annulus(0.3), 2.0 / 64);
  const auto f = solver.harmonic_measure(1);
  expect_error(ErrorCode::kPathLeavesDomain,
               [&] { complex_measure_path(f, {{0.5, 0.0}, {-0.5, 0.0}}); });
}

TEST(PeriodMatrix, AnnulusTorus) {
  const double r = std::exp(-kPi);
  HarmonicSolver solver(circular_annulus(r), 2.0 / 256);
  const auto fields = solver.harmonic_measures();
  const auto s = surface_data(fields);
  const std::complex<double> b_exact{0.0, std::log(1 / r) / kPi};
  EXPECT_LT(std::abs(s.period_matrix(0, 0) - b_exact), 2e-2 * std::abs(b_exact));
  EXPECT_LT(std::abs(s.period_matrix(0, 0).real()), 1e-3 * s.period_matrix(0, 0).imag());
  EXPECT_NEAR(std::abs(std::complex<double>(0, 1) / s.period_matrix(0, 0) - s.tau(0, 0)) /
                  s.tau(0, 0),
              0.0, 1e-2);
  // Radial path from d_0 to d_1 gives half the B-period.
  EXPECT_LT(std::abs(s.abel(0, 0) - 0.5 * b_exact), 1e-2);
  // A-period normalisation.
  const auto p = s.a_periods * s.omega_coeffs;
  EXPECT_NEAR(std::abs(p(0, 0) - 1.0), 0.0, 1e-12);
  const auto second = complex_measure_path(fields[0], hole_contour(fields[0].mesh(), 1, 6));
  EXPECT_NEAR(std::abs(second * s.omega_coeffs(0, 0) - 1.0), 0.0, 1e-3);
}

TEST(PeriodMatrix, RotatedMarkedPoint) {
  const double r = 0.2, phi = 1.1;
  HarmonicSolver solver(circular_annulus(r, phi), 2.0 / 256);
  const auto s = surface_data(solver.harmonic_measures());
  // Abel integral picks up phi / (2 pi) in its real part.
  EXPECT_NEAR(s.abel(0, 0).real(), phi / (2 * kPi), 1e-2);
  EXPECT_NEAR(s.abel(0, 0).imag(), std::log(1 / r) / (2 * kPi), 1e-2);
}

TEST(PeriodMatrix, GenusTwoCrossCheck) {
  HarmonicSolver solver(two_holes(), 4.0 / 256);
  const auto s = surface_data(solver.harmonic_measures());
  const Eigen::MatrixXcd& b = s.period_matrix;
  EXPECT_LT((b - b.transpose()).norm(), 1e-3 * b.norm());
  EXPECT_LT(b.real().norm(), 1e-3 * b.imag().norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.imag());
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  const Eigen::MatrixXcd ib = std::complex<double>(0, 1) * b.inverse();
  EXPECT_LT((ib - s.tau.cast<std::complex<double>>()).norm() / s.tau.norm(), 1e-2);
  const Eigen::MatrixXcd unit = s.a_periods * s.omega_coeffs;
  EXPECT_LT((unit - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-10);
}

TEST(HarmonicSolver, Errors) {
  expect_error(ErrorCode::kMeshTooCoarse,
               [] { HarmonicSolver(circular_annulus(0.05), 2.0 / 64); });
  HarmonicSolver solver(circular_annulus(0.3), 2.0 / 64);
  expect_error(ErrorCode::kSourceTooCloseToBoundary,
               [&] { solver.greens_function({0.97, 0.0}); });
  expect_error(ErrorCode::kMissingHarmonicData, [&] { solver.harmonic_measure(2); });
}
