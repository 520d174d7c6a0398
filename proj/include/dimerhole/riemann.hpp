#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dimerhole/harmonic.hpp"

namespace dimerhole {

// Riemann theta function
//   theta[a; b](z) = sum_n exp(pi i (n+a).B(n+a) + 2 pi i (n+a).(z+b))
// summed over the ellipsoid (n + a - c).Im B (n + a - c) <= R^2 centred on
// c = -Im(B)^-1 Im(z), with R chosen from the tolerance and derivative order.
class Theta {
 public:
  // Throws kTruncationInsufficient unless B is symmetric with positive
  // definite imaginary part.
  explicit Theta(Eigen::MatrixXcd period, double tol = 1e-12);

  int genus() const { return static_cast<int>(period_.rows()); }
  const Eigen::MatrixXcd& period() const { return period_; }
  double tolerance() const { return tol_; }
  // Squared truncation radius for derivatives of total order `order`.
  double radius_squared(int order) const;

  // Partial derivative d^alpha theta(z); alpha empty means no derivative.
  // Throws kTruncationInsufficient beyond total order 6.
  std::complex<double> operator()(const Eigen::VectorXcd& z,
                                  const std::vector<int>& alpha = {}) const;
  std::complex<double> with_characteristic(const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& b,
                                           const Eigen::VectorXcd& z,
                                           const std::vector<int>& alpha = {}) const;

  // Genus-1 conveniences: theta(z) and the odd theta[1/2; 1/2](z).
  std::complex<double> scalar(std::complex<double> z, int derivative = 0) const;
  std::complex<double> odd(std::complex<double> z, int derivative = 0) const;

 private:
  Eigen::MatrixXcd period_;
  Eigen::MatrixXd imag_;
  Eigen::MatrixXd imag_inv_;
  double tol_;
};

struct ShiftResult {
  Eigen::VectorXcd riemann_constants;
  Eigen::VectorXcd raw;  // -sum_j abel_j + riemann constants, unreduced
  Eigen::VectorXd e;     // real part reduced to [0, 1)
  double max_imag = 0.0;
};

// Riemann constants D = -kappa + B.(1, ..., 1) from the base-point formula
//   kappa_k = (1 + B_kk)/2 - sum_{l != k} contour integral over A_l of
//             omega_l(z) * (integral of omega_k from d_0 to z),
// where the Abel integral to A_l is taken through the mirror copy of U (its
// U-side value minus B_lk), and e = -sum_j abel_j + D, so that
// theta(abel_j + e) = 0 for every j. Stores both in `surface`. Throws
// kNonRealShift if some |Im e_k| exceeds `imag_tol`.
ShiftResult compute_shift(SurfaceData& surface, double imag_tol = 1e-3);

// |theta(abel_j + e)| for j = 1..g, each divided by the largest |theta| over
// a grid of real translates of the same argument.
Eigen::VectorXd zero_divisor_residual(const Theta& theta,
                                      const SurfaceData& surface,
                                      const Eigen::VectorXd& e);

// Genus-1 chart of the double: u(z) = integral of omega from d_0 to z inside
// U, and its conjugate for the mirror copy of z.
class TorusChart {
 public:
  TorusChart(const std::vector<HarmonicField>& fields, const SurfaceData& surface);

  std::complex<double> u(Point z, bool mirror = false) const;
  // du/dz in the planar coordinate (the conjugate coordinate on the mirror).
  std::complex<double> du(Point z, bool mirror = false) const;

 private:
  const std::vector<HarmonicField>* fields_;
  std::complex<double> coeff_;
};

// omega_0 = 4 theta(u2 - u1 + e) / (theta(e) E) from lifted chart data: u_k
// on the universal cover and s_k a branch of sqrt(du/dz) at z_k. The prime
// form is E = theta_odd(u2 - u1) / (theta_odd'(0) s1 s2).
std::complex<double> omega0_lifted(const Theta& theta, double e,
                                   std::complex<double> u1, std::complex<double> s1,
                                   std::complex<double> u2, std::complex<double> s2);
std::complex<double> prime_form_lifted(const Theta& theta,
                                       std::complex<double> u1, std::complex<double> s1,
                                       std::complex<double> u2, std::complex<double> s2);

// omega_0(z1, z2) with principal square roots and in-U Abel paths. Throws
// kCoincidentPoints when the two points of the double coincide and
// kUnsupportedDomain unless the genus is 1.
std::complex<double> omega0_g1(const Theta& theta, double e, const TorusChart& chart,
                               Point z1, bool mirror1, Point z2, bool mirror2);

}  // namespace dimerhole
