#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dimerhole {

// Joint cumulant of K <= 4 variables from a mixed-moment oracle:
//   kappa = sum over set partitions pi of {0..K-1} of
//           (-1)^(|pi|-1) (|pi|-1)! prod_{block} moment(block).
double cumulant_from_moments(
    int k, const std::function<double(const std::vector<int>& block)>& moment);

// Discrete Gaussian on Z^g: P(X = n) = exp(-pi (n-e).tau(n-e)) / C. The
// lattice is truncated to pi (n-e).tau(n-e) <= pi R^2 with the theta
// truncation radius for fourth-order derivatives.
class DiscreteGaussian {
 public:
  DiscreteGaussian(Eigen::MatrixXd tau, Eigen::VectorXd e, double tol = 1e-12);

  int genus() const { return static_cast<int>(tau_.rows()); }
  const Eigen::MatrixXd& tau() const { return tau_; }
  const Eigen::VectorXd& shift() const { return e_; }
  double normalization() const { return norm_; }
  double pmf(const Eigen::VectorXi& n) const;

  // Truncated support ordered by decreasing probability.
  const std::vector<Eigen::VectorXi>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return prob_; }

  Eigen::VectorXd mean() const { return mean_; }
  Eigen::MatrixXd covariance() const;
  // Raw moment E[prod_i X_i^alpha_i] by direct lattice summation.
  double moment(const std::vector<int>& alpha) const;
  // Joint cumulant for the multi-index alpha (total order 1..4).
  double cumulant(const std::vector<int>& alpha) const;

  // Inverse CDF over the truncated support; deterministic per seed.
  Eigen::VectorXi sample(std::uint64_t seed) const;
  std::vector<Eigen::VectorXi> sample_many(std::uint64_t master_seed,
                                           std::size_t count) const;

 private:
  Eigen::MatrixXd tau_;
  Eigen::VectorXd e_;
  double norm_ = 0.0;
  std::vector<Eigen::VectorXi> support_;
  std::vector<double> prob_;
  std::vector<double> cdf_;
  Eigen::VectorXd mean_;
};

// Cumulant of the discrete Gaussian with tau = i B^-1 from theta derivatives:
//   (2 pi i)^K kappa = d^alpha [log theta(Bz + e) + pi i z.Bz] at z = 0.
// Throws kThetaNearZero when |theta(e)| is negligible against the sum of
// absolute series terms, kTruncationInsufficient unless 2 <= K <= 4.
double cumulant_via_theta(const Eigen::MatrixXcd& period, const Eigen::VectorXcd& e,
                          const std::vector<int>& alpha);
double cumulant_via_theta(const Eigen::MatrixXcd& period, const Eigen::VectorXd& e,
                          const std::vector<int>& alpha);

}  // namespace dimerhole
