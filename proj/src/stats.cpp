#include "dimerhole/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace dimerhole {

double chi_square_sf(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquare chi_square_test(const std::vector<double>& observed,
                          const std::vector<double>& probabilities,
                          double min_expected) {
  if (observed.size() != probabilities.size()) {
    throw std::invalid_argument("chi_square_test: size mismatch");
  }
  double total = 0.0;
  for (double o : observed) total += o;
  ChiSquare out;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  int cells = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double expected = total * probabilities[k];
    if (expected < min_expected) {
      pooled_obs += observed[k];
      pooled_exp += expected;
      continue;
    }
    out.statistic += (observed[k] - expected) * (observed[k] - expected) / expected;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 0.0) {
    out.statistic = INFINITY;
    ++cells;
  }
  out.dof = cells - 1;
  out.p_value = std::isinf(out.statistic) ? 0.0 : chi_square_sf(out.statistic, out.dof);
  return out;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

double SampleMoments::mean() const { return mean_of(values); }

double SampleMoments::central(int k) const {
  const double m = mean();
  double s = 0.0;
  for (double x : values) s += std::pow(x - m, k);
  return s / static_cast<double>(values.size());
}

double SampleMoments::variance() const {
  const double n = static_cast<double>(values.size());
  return central(2) * n / (n - 1.0);
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double covariance_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x), my = mean_of(y);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - mx) * (y[k] - my);
  return s / static_cast<double>(x.size() - 1);
}

double correlation_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double c = covariance_of(x, y);
  const double vx = covariance_of(x, x), vy = covariance_of(y, y);
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return c / std::sqrt(vx * vy);
}

}  // namespace dimerhole
