#include "dimerhole/dgauss.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include "dimerhole/error.hpp"
#include "dimerhole/riemann.hpp"
#include "dimerhole/sampler.hpp"

namespace dimerhole {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};
constexpr int kMaxOrder = 4;

// All set partitions of {0..k-1}, each as a list of blocks.
std::vector<std::vector<std::vector<int>>> set_partitions(int k) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  std::function<void(int)> rec = [&](int i) {
    if (i == k) {
      out.push_back(cur);
      return;
    }
    // Indexed: the recursion below may reallocate `cur`.
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(i);
      rec(i + 1);
      cur[b].pop_back();
    }
    cur.push_back({i});
    rec(i + 1);
    cur.pop_back();
  };
  rec(0);
  return out;
}

template <class T>
T mobius_sum(int k, const std::function<T(const std::vector<int>&)>& moment) {
  if (k < 1 || k > kMaxOrder) {
    throw Error(ErrorCode::kTruncationInsufficient, "cumulant order must be 1..4");
  }
  T sum{};
  for (const auto& pi : set_partitions(k)) {
    const int b = static_cast<int>(pi.size());
    double coef = (b % 2 == 1) ? 1.0 : -1.0;
    for (int m = 2; m < b; ++m) coef *= m;
    T prod{1.0};
    for (const auto& block : pi) prod *= moment(block);
    sum += coef * prod;
  }
  return sum;
}

// Expands a multi-index into the list of coordinate indices it repeats.
std::vector<int> variables_of(const std::vector<int>& alpha, int g) {
  if (static_cast<int>(alpha.size()) != g) {
    throw Error(ErrorCode::kTruncationInsufficient, "multi-index has wrong length");
  }
  std::vector<int> vars;
  for (int i = 0; i < g; ++i) {
    if (alpha[i] < 0) {
      throw Error(ErrorCode::kTruncationInsufficient, "negative multi-index entry");
    }
    for (int r = 0; r < alpha[i]; ++r) vars.push_back(i);
  }
  return vars;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double cumulant_from_moments(
    int k, const std::function<double(const std::vector<int>& block)>& moment) {
  return mobius_sum<double>(k, moment);
}

DiscreteGaussian::DiscreteGaussian(Eigen::MatrixXd tau, Eigen::VectorXd e, double tol)
    : tau_(std::move(tau)), e_(std::move(e)) {
  const int g = genus();
  if (g < 1 || tau_.cols() != g || e_.size() != g) {
    throw Error(ErrorCode::kTruncationInsufficient, "tau and e sizes disagree");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(tau_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kTruncationInsufficient, "tau is not positive definite");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(g, g));
  const double r2 = (-std::log(tol) + 4.0 * kMaxOrder + 4.0) / kPi;
  std::vector<int> lo(g), hi(g);
  for (int i = 0; i < g; ++i) {
    const double w = std::sqrt(r2 * inv(i, i));
    lo[i] = static_cast<int>(std::floor(e_[i] - w));
    hi[i] = static_cast<int>(std::ceil(e_[i] + w));
  }
  std::vector<std::pair<double, Eigen::VectorXi>> pts;
  Eigen::VectorXi n = Eigen::Map<Eigen::VectorXi>(lo.data(), g);
  while (true) {
    const Eigen::VectorXd d = n.cast<double>() - e_;
    const double q = d.dot(tau_ * d);
    if (q <= r2) pts.emplace_back(std::exp(-kPi * q), n);
    int i = 0;
    while (i < g && ++n[i] > hi[i]) {
      n[i] = lo[i];
      ++i;
    }
    if (i == g) break;
  }
  // Ties broken lexicographically so the order is platform independent.
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return std::lexicographical_compare(a.second.begin(), a.second.end(),
                                        b.second.begin(), b.second.end());
  });
  // Sum from the smallest weights up.
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) norm_ += it->first;
  mean_ = Eigen::VectorXd::Zero(g);
  double acc = 0.0;
  for (const auto& [w, p] : pts) {
    support_.push_back(p);
    prob_.push_back(w / norm_);
    acc += w / norm_;
    cdf_.push_back(acc);
    mean_ += (w / norm_) * p.cast<double>();
  }
}

double DiscreteGaussian::pmf(const Eigen::VectorXi& n) const {
  const Eigen::VectorXd d = n.cast<double>() - e_;
  return std::exp(-kPi * d.dot(tau_ * d)) / norm_;
}

double DiscreteGaussian::moment(const std::vector<int>& alpha) const {
  const auto vars = variables_of(alpha, genus());
  double sum = 0.0;
  for (std::size_t s = prob_.size(); s-- > 0;) {
    double term = prob_[s];
    for (int v : vars) term *= support_[s][v];
    sum += term;
  }
  return sum;
}

Eigen::MatrixXd DiscreteGaussian::covariance() const {
  const int g = genus();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(g, g);
  for (std::size_t s = prob_.size(); s-- > 0;) {
    const Eigen::VectorXd d = support_[s].cast<double>() - mean_;
    c += prob_[s] * d * d.transpose();
  }
  return c;
}

double DiscreteGaussian::cumulant(const std::vector<int>& alpha) const {
  const auto vars = variables_of(alpha, genus());
  const int k = static_cast<int>(vars.size());
  if (k == 1) return mean_[vars[0]];
  // Cumulants of order >= 2 are shift invariant; central moments avoid
  // cancellation.
  std::map<std::vector<int>, double> cache;
  return cumulant_from_moments(k, [&](const std::vector<int>& block) {
    std::vector<int> key;
    for (int b : block) key.push_back(vars[b]);
    std::sort(key.begin(), key.end());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double sum = 0.0;
    for (std::size_t s = prob_.size(); s-- > 0;) {
      double term = prob_[s];
      for (int v : key) term *= support_[s][v] - mean_[v];
      sum += term;
    }
    cache.emplace(key, sum);
    return sum;
  });
}

Eigen::VectorXi DiscreteGaussian::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  const double u = uniform01(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t idx = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
  return support_[idx];
}

std::vector<Eigen::VectorXi> DiscreteGaussian::sample_many(std::uint64_t master_seed,
                                                           std::size_t count) const {
  std::vector<Eigen::VectorXi> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(derive_seed(master_seed, i)));
  return out;
}

double cumulant_via_theta(const Eigen::MatrixXcd& period, const Eigen::VectorXcd& e,
                          const std::vector<int>& alpha) {
  const int g = static_cast<int>(period.rows());
  const auto vars = variables_of(alpha, g);
  const int k = static_cast<int>(vars.size());
  if (k < 2 || k > kMaxOrder) {
    throw Error(ErrorCode::kTruncationInsufficient, "theta cumulants need order 2..4");
  }
  const Theta theta(period);
  const std::complex<double> t0 = theta(e);
  // Sum of |terms| of the series at e: theta for i Im B at i Im e.
  const Theta bound(kI * period.imag().cast<std::complex<double>>());
  const double scale = std::abs(bound(kI * e.imag().cast<std::complex<double>>()));
  if (std::abs(t0) < 1e-10 * scale) {
    throw Error(ErrorCode::kThetaNearZero, "theta(e) vanishes");
  }
  std::map<std::vector<int>, std::complex<double>> partial;
  auto d_theta = [&](const std::vector<int>& mi) {
    auto it = partial.find(mi);
    if (it != partial.end()) return it->second;
    const auto v = theta(e, mi);
    partial.emplace(mi, v);
    return v;
  };
  // d^S theta(Bz + e) at 0 for the variables in block S, by the chain rule.
  auto block_derivative = [&](const std::vector<int>& block) {
    const int m = static_cast<int>(block.size());
    std::vector<int> j(m, 0);
    std::complex<double> sum = 0.0;
    while (true) {
      std::complex<double> coef = 1.0;
      std::vector<int> mi(g, 0);
      for (int s = 0; s < m; ++s) {
        coef *= period(j[s], vars[block[s]]);
        ++mi[j[s]];
      }
      sum += coef * d_theta(mi);
      int s = 0;
      while (s < m && ++j[s] == g) j[s++] = 0;
      if (s == m) break;
    }
    return sum / t0;
  };
  std::complex<double> value = mobius_sum<std::complex<double>>(
      k, std::function<std::complex<double>(const std::vector<int>&)>(block_derivative));
  if (k == 2) value += 2.0 * kPi * kI * period(vars[0], vars[1]);
  return (value / std::pow(2.0 * kPi * kI, k)).real();
}

double cumulant_via_theta(const Eigen::MatrixXcd& period, const Eigen::VectorXd& e,
                          const std::vector<int>& alpha) {
  return cumulant_via_theta(period, Eigen::VectorXcd(e.cast<std::complex<double>>()), alpha);
}

}  // namespace dimerhole
