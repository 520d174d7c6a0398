#include "dimerhole/riemann.hpp"

#include <cmath>
#include <numbers>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};
constexpr long kMaxLatticePoints = 5'000'000;

}  // namespace

Theta::Theta(Eigen::MatrixXcd period, double tol)
    : period_(std::move(period)), tol_(tol) {
  const int g = genus();
  if (g < 1 || period_.cols() != g) {
    throw Error(ErrorCode::kTruncationInsufficient, "period matrix must be square");
  }
  if ((period_ - period_.transpose()).norm() > 1e-10 * (1.0 + period_.norm())) {
    throw Error(ErrorCode::kTruncationInsufficient, "period matrix is not symmetric");
  }
  imag_ = period_.imag();
  imag_ = 0.5 * (imag_ + imag_.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(imag_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kTruncationInsufficient,
                "imaginary part of the period matrix is not positive definite");
  }
  imag_inv_ = llt.solve(Eigen::MatrixXd::Identity(g, g));
}

double Theta::radius_squared(int order) const {
  return (-std::log(tol_) + 4.0 * order + 4.0) / kPi;
}

std::complex<double> Theta::with_characteristic(const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& b,
                                                const Eigen::VectorXcd& z,
                                                const std::vector<int>& alpha) const {
  const int g = genus();
  int order = 0;
  for (int k : alpha) order += k;
  if (order > 6) {
    throw Error(ErrorCode::kTruncationInsufficient, "derivative order above 6");
  }
  if (!alpha.empty() && static_cast<int>(alpha.size()) != g) {
    throw Error(ErrorCode::kTruncationInsufficient, "multi-index has wrong length");
  }
  const double r2 = radius_squared(order);
  const Eigen::VectorXd centre = -imag_inv_ * z.imag() - a;
  std::vector<int> lo(g), hi(g);
  long count = 1;
  for (int i = 0; i < g; ++i) {
    const double w = std::sqrt(r2 * imag_inv_(i, i));
    lo[i] = static_cast<int>(std::floor(centre[i] - w));
    hi[i] = static_cast<int>(std::ceil(centre[i] + w));
    count *= hi[i] - lo[i] + 1;
  }
  if (count > kMaxLatticePoints) {
    throw Error(ErrorCode::kTruncationInsufficient, "truncation window too large");
  }
  const Eigen::VectorXcd zb = z + b.cast<std::complex<double>>();
  std::vector<int> n(lo);
  Eigen::VectorXd m(g), d(g);
  std::complex<double> sum = 0.0;
  while (true) {
    for (int i = 0; i < g; ++i) {
      m[i] = n[i] + a[i];
      d[i] = n[i] - centre[i];
    }
    if (d.dot(imag_ * d) <= r2) {
      const std::complex<double> mc_b =
          (m.cast<std::complex<double>>().transpose() * period_ *
           m.cast<std::complex<double>>())(0, 0);
      const std::complex<double> mz = (m.cast<std::complex<double>>().transpose() * zb)(0, 0);
      std::complex<double> term = std::exp(kI * kPi * mc_b + 2.0 * kI * kPi * mz);
      for (int i = 0; i < static_cast<int>(alpha.size()); ++i) {
        for (int k = 0; k < alpha[i]; ++k) term *= 2.0 * kI * kPi * m[i];
      }
      sum += term;
    }
    int i = 0;
    while (i < g && ++n[i] > hi[i]) {
      n[i] = lo[i];
      ++i;
    }
    if (i == g) break;
  }
  return sum;
}

std::complex<double> Theta::operator()(const Eigen::VectorXcd& z,
                                       const std::vector<int>& alpha) const {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(genus());
  return with_characteristic(zero, zero, z, alpha);
}

std::complex<double> Theta::scalar(std::complex<double> z, int derivative) const {
  Eigen::VectorXcd v(1);
  v[0] = z;
  return (*this)(v, {derivative});
}

std::complex<double> Theta::odd(std::complex<double> z, int derivative) const {
  Eigen::VectorXcd v(1);
  v[0] = z;
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(1, 0.5);
  return with_characteristic(half, half, v, {derivative});
}

ShiftResult compute_shift(SurfaceData& s, double imag_tol) {
  const int g = s.genus;
  const Eigen::MatrixXcd& b = s.period_matrix;
  ShiftResult out;
  out.riemann_constants.resize(g);
  for (int k = 0; k < g; ++k) {
    std::complex<double> d = 0.5 * (1.0 + b(k, k));
    for (int l = 0; l < g; ++l) {
      if (l != k) d -= s.contour_moments(l, k) - b(l, k);
    }
    // theta(A(z) + e) with Sum A(d_j) = -e + D needs D = -kappa; the lattice
    // shift B.(1, ..., 1) keeps e real.
    out.riemann_constants[k] = -d + b.row(k).sum();
  }
  out.raw = out.riemann_constants - s.abel.colwise().sum().transpose();
  out.e.resize(g);
  for (int k = 0; k < g; ++k) {
    out.e[k] = out.raw[k].real() - std::floor(out.raw[k].real());
    if (out.e[k] >= 1.0) out.e[k] -= 1.0;
    out.max_imag = std::max(out.max_imag, std::abs(out.raw[k].imag()));
  }
  s.riemann_constants = out.riemann_constants;
  s.shift = out.raw;
  if (out.max_imag > imag_tol) {
    throw Error(ErrorCode::kNonRealShift,
                "imaginary part of e is " + std::to_string(out.max_imag));
  }
  return out;
}

Eigen::VectorXd zero_divisor_residual(const Theta& theta, const SurfaceData& s,
                                      const Eigen::VectorXd& e) {
  const int g = s.genus;
  Eigen::VectorXd out(g);
  constexpr int kGrid = 8;
  for (int j = 0; j < g; ++j) {
    const Eigen::VectorXcd arg =
        s.abel.row(j).transpose() + e.cast<std::complex<double>>();
    double scale = 0.0;
    std::vector<int> idx(g, 0);
    while (true) {
      Eigen::VectorXcd probe = arg;
      for (int k = 0; k < g; ++k) probe[k] += double(idx[k]) / kGrid;
      scale = std::max(scale, std::abs(theta(probe)));
      int k = 0;
      while (k < g && ++idx[k] == kGrid) idx[k++] = 0;
      if (k == g) break;
    }
    out[j] = std::abs(theta(arg)) / scale;
  }
  return out;
}

TorusChart::TorusChart(const std::vector<HarmonicField>& fields,
                       const SurfaceData& surface)
    : fields_(&fields) {
  if (surface.genus != 1 || fields.size() != 1) {
    throw Error(ErrorCode::kUnsupportedDomain, "torus chart needs genus 1");
  }
  coeff_ = surface.omega_coeffs(0, 0);
}

std::complex<double> TorusChart::u(Point z, bool mirror) const {
  Eigen::MatrixXcd c(1, 1);
  c(0, 0) = coeff_;
  const std::complex<double> v = abel_map(*fields_, c, z)[0];
  return mirror ? std::conj(v) : v;
}

std::complex<double> TorusChart::du(Point z, bool mirror) const {
  const Point g = (*fields_)[0].gradient(z);
  const std::complex<double> v = coeff_ * std::complex<double>(g.x, -g.y);
  return mirror ? std::conj(v) : v;
}

std::complex<double> prime_form_lifted(const Theta& theta, std::complex<double> u1,
                                       std::complex<double> s1, std::complex<double> u2,
                                       std::complex<double> s2) {
  return theta.odd(u2 - u1) / (theta.odd(0.0, 1) * s1 * s2);
}

std::complex<double> omega0_lifted(const Theta& theta, double e, std::complex<double> u1,
                                   std::complex<double> s1, std::complex<double> u2,
                                   std::complex<double> s2) {
  return 4.0 * theta.scalar(u2 - u1 + e) /
         (theta.scalar(e) * prime_form_lifted(theta, u1, s1, u2, s2));
}

std::complex<double> omega0_g1(const Theta& theta, double e, const TorusChart& chart,
                               Point z1, bool mirror1, Point z2, bool mirror2) {
  if (theta.genus() != 1) {
    throw Error(ErrorCode::kUnsupportedDomain, "omega_0 is implemented at genus 1");
  }
  if (mirror1 == mirror2 && norm(z1 - z2) < 1e-12) {
    throw Error(ErrorCode::kCoincidentPoints, "omega_0 on the diagonal");
  }
  const auto u1 = chart.u(z1, mirror1), u2 = chart.u(z2, mirror2);
  return omega0_lifted(theta, e, u1, std::sqrt(chart.du(z1, mirror1)), u2,
                       std::sqrt(chart.du(z2, mirror2)));
}

}  // namespace dimerhole
