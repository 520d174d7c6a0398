#pragma once

#include <cstddef>
#include <vector>

namespace dimerhole {

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Upper tail P(chi2_dof >= statistic).
double chi_square_sf(double statistic, int dof);

// Pearson test of observed counts against expected probabilities. Cells with
// expected count below `min_expected` are pooled into one cell.
ChiSquare chi_square_test(const std::vector<double>& observed,
                          const std::vector<double>& probabilities,
                          double min_expected = 5.0);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

// Running sums of powers for mean, variance and central moments.
struct SampleMoments {
  std::vector<double> values;

  void add(double x) { values.push_back(x); }
  std::size_t count() const { return values.size(); }
  double mean() const;
  // k-th central moment with the empirical mean (1/N normalization).
  double central(int k) const;
  double variance() const;  // unbiased
};

double mean_of(const std::vector<double>& x);
double covariance_of(const std::vector<double>& x, const std::vector<double>& y);
double correlation_of(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dimerhole
