#include "kssync/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kssync {

long DomainConfig::steps() const {
  // Round rather than truncate so T = 100, h = 0.005 gives exactly 20000.
  return std::lround(T / h);
}

void DomainConfig::validate() const {
  if (!(X > 0.0) || !std::isfinite(X)) throw std::invalid_argument("X must be positive");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
}

SpectralCoefficients::SpectralCoefficients(ComplexVector c) : c_(std::move(c)) {
  if (c_.size() == 0) throw std::invalid_argument("SpectralCoefficients needs at least c_0");
  c_[0].imag(0.0);
}

SpectralCoefficients::SpectralCoefficients(std::initializer_list<Complex> c)
    : c_(static_cast<Eigen::Index>(c.size())) {
  if (c.size() == 0) throw std::invalid_argument("SpectralCoefficients needs at least c_0");
  Eigen::Index i = 0;
  for (const auto& v : c) c_[i++] = v;
  c_[0].imag(0.0);
}

void SpectralCoefficients::axpy(double step, const ComplexVector& delta) {
  c_ += step * delta;
  c_[0].imag(0.0);
}

SpectralCoefficients SpectralCoefficients::resized(int K) const {
  ComplexVector out = ComplexVector::Zero(K + 1);
  const int n = std::min(K, order()) + 1;
  out.head(n) = c_.head(n);
  return SpectralCoefficients(std::move(out));
}

double SpectralCoefficients::power() const {
  double p = std::norm(c_[0]);
  for (Eigen::Index k = 1; k < c_.size(); ++k) p += 2.0 * std::norm(c_[k]);
  return p;
}

double SpectralCoefficients::max_abs() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < c_.size(); ++k) m = std::max(m, std::abs(c_[k]));
  return m;
}

ComplexVector linear_diag(const ModelParams& theta, double omega0, int K) {
  ComplexVector d(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double wk = omega0 * k;
    const double wk2 = wk * wk;
    d[k] = Complex(theta.alpha * wk2 - theta.gamma * wk2 * wk2, theta.beta * wk2 * wk);
  }
  return d;
}

ComplexVector nonlinear_term(const SpectralCoefficients& c) {
  const int K = c.order();
  // Two-sided copy: full[K + l] = c_l for l = -K ... K.
  std::vector<Complex> full(2 * K + 1);
  for (int l = -K; l <= K; ++l) full[K + l] = c.at(l);

  ComplexVector eta = ComplexVector::Zero(K + 1);
  for (int k = 1; k <= K; ++k) {
    // Pairs (l, k - l) with both indices in [-K, K]: l in [k - K, K].
    // The summand is symmetric under l <-> k - l, so sum l < k/2 twice and
    // add the diagonal term once when k is even.
    const int lo = k - K;
    Complex acc{0.0, 0.0};
    int l = lo;
    for (; 2 * l < k; ++l) acc += full[K + l] * full[K + k - l];
    acc *= 2.0;
    if (2 * l == k) acc += full[K + l] * full[K + l];
    eta[k] = static_cast<double>(k) * acc;
  }
  return eta;
}

std::vector<double> synthesize_field(const SpectralCoefficients& c, std::span<const double> xs,
                                     double X) {
  const double w0 = 2.0 * std::numbers::pi / X;
  std::vector<double> u(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double v = c[0].real();
    for (int k = 1; k <= c.order(); ++k) {
      const double ph = w0 * k * xs[j];
      v += 2.0 * (c[k].real() * std::cos(ph) - c[k].imag() * std::sin(ph));
    }
    u[j] = v;
  }
  return u;
}

SynthesisTable::SynthesisTable(std::span<const double> xs, double X, int K)
    : basis_(static_cast<Eigen::Index>(xs.size()), K + 1) {
  const double w0 = 2.0 * std::numbers::pi / X;
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (int k = 0; k <= K; ++k) basis_(j, k) = std::polar(1.0, w0 * k * xs[j]);
}

RealVector SynthesisTable::synthesize(const SpectralCoefficients& c) const {
  const int n = std::min(order(), c.order());
  RealVector u = RealVector::Constant(basis_.rows(), c[0].real());
  if (n >= 1)
    u += 2.0 * (basis_.middleCols(1, n) * c.vec().segment(1, n)).real();
  return u;
}

}  // namespace kssync
