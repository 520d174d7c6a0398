#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dimerhole/dgauss.hpp"
#include "dimerhole/harmonic.hpp"
#include "dimerhole/height.hpp"
#include "dimerhole/riemann.hpp"

namespace dimerhole {

// A query is the average over a disk of the given radius; radius 0 means
// the point itself (the nearest lattice vertex on the lattice side).
struct QueryWindow {
  Point center;
  double radius = 0.0;
};

// Continuum predictions at a set of query windows. Disk averages of
// harmonic functions are centre values, so
//   G_ij = g_U(c_i, c_j) for disjoint windows,
//   G_ii = H(c_i, c_i) - (log rho_i - 1/4) / (2 pi),
// with H the regular part of g_U. Point queries have G_ii = +inf, and
// queries on the boundary have G = 0 and f equal to the boundary data.
struct PredictionBundle {
  DomainSpec domain;
  std::vector<QueryWindow> queries;
  std::vector<HarmonicField> fields;  // f_1..f_g
  Eigen::MatrixXd greens;             // queries x queries
  Eigen::MatrixXd harmonic;           // queries x g
  SurfaceData surface;                // genus >= 1 only
  Eigen::VectorXd e;
  Eigen::MatrixXd x_covariance;       // Cov(X) of the discrete Gaussian

  int genus() const { return domain.genus(); }
};

// Throws kCoincidentPoints for overlapping distinct windows and
// kSourceTooCloseToBoundary for windows that leave the domain.
PredictionBundle predict(const DomainSpec& domain, std::vector<QueryWindow> queries,
                         double h);

// (16/pi) G_ij for the corrected field, plus 16 f_i.Cov(X).f_j for the
// uncorrected one.
double predicted_covariance(const PredictionBundle& bundle, int i, int j,
                            bool uncorrected = false);

// E[h~_i h~_j h~_k h~_l] as the sum over the three pairings of covariances.
double predicted_fourth_moment(const PredictionBundle& bundle, int i, int j, int k, int l);

struct ContourCovariance {
  double value = 0.0;
  double imag = 0.0;  // imaginary residue of the double integral
};

// Genus-1 covariance of the uncorrected field from the omega_0 kernel:
//   (1/4 pi^2) int int k(u2 - u1) dt1 dt2,
//   k(x) = 16 theta(x+e) theta(e-x) theta_odd'(0)^2 / (theta(e)^2 theta_odd(x)^2),
// over the vertical chart segments from the mirror point to z_m. Throws
// kUnsupportedDomain unless genus 1, kPathsIntersect when the segments
// overlap.
ContourCovariance contour_covariance_k2(const std::vector<HarmonicField>& fields,
                                        const SurfaceData& surface, double e, Point z1,
                                        Point z2);

// Lattice-side window: (vertex, weight) pairs with uniform weights.
std::vector<std::pair<int, double>> window_weights(const HeightLattice& lattice,
                                                   QueryWindow window);

// f_j at every lattice vertex, indexed [j - 1][vertex]. Vertices on region
// loop k take the boundary data delta_jk; other vertices outside the domain
// take the data of the nearest boundary component.
std::vector<std::vector<double>> harmonic_on_vertices(
    const std::vector<HarmonicField>& fields, const HeightLattice& lattice);

// Per-sample statistics: hole heights and window averages of h - E h and of
// the corrected field h~.
struct SampleRecord {
  std::vector<double> z;
  std::vector<double> centered;
  std::vector<double> uncentered;
};

SampleRecord record_sample(const HeightLattice& lattice, const HeightField& h,
                           const ExpectedHeightField& expected,
                           const std::vector<std::vector<double>>& harmonic,
                           const std::vector<std::vector<std::pair<int, double>>>& windows);

struct Statistic {
  std::string name;
  double empirical = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
  double z = 0.0;
  double gate = 4.0;
  bool pass = false;
};

struct MomentReport {
  std::size_t samples = 0;
  std::vector<Statistic> stats;

  bool pass() const;
  const Statistic& find(const std::string& name) const;
  std::string table() const;
};

struct MomentOptions {
  double gate = 4.0;
  std::size_t min_samples = 500;
};

// Per window i: mean, variance against (16/pi) G_ii (finite windows only),
// third moment against 0 and the Wick relation m4 = 3 m2^2 by the delta
// method. Per window pair: covariance. Per hole k and window i:
// corr(Z_k, h~_i) with gate/sqrt(N). Throws kInsufficientSamples.
MomentReport moment_suite(const std::vector<SampleRecord>& samples,
                          const PredictionBundle& bundle, const MomentOptions& options = {});

struct GofCell {
  Eigen::VectorXi n;
  double observed = 0.0;  // empirical frequency
  double expected = 0.0;  // model probability
};

struct GofReport {
  std::size_t samples = 0;
  double total_variation = 0.0;
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 0.0;
  bool support_ok = false;   // every Z_j is constant mod 4 across samples
  Eigen::VectorXd offsets;   // Z/4 + E[X] minus the nearest integer
  std::vector<GofCell> cells;
};

// Empirical law of Z/4 + E[X] rounded to the integer lattice against the
// discrete Gaussian. Z is centred by the exact expectation, so this compares
// Z/4 with X - E[X]. Throws kInsufficientSamples below `min_samples` or at
// genus 0.
GofReport gof_hole_law(const std::vector<std::vector<double>>& z,
                       const DiscreteGaussian& law, std::size_t min_samples = 2000);

}  // namespace dimerhole
