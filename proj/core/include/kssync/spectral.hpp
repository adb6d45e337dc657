#pragma once

// Truncated Fourier representation of real periodic fields and the algebra
// of the Galerkin-projected generalized Kuramoto-Sivashinsky equation
//
//   u_t + u u_x + alpha u_xx + beta u_xxx + gamma u_xxxx = 0,  u(t, x) = u(t, x + X).
//
// A field is stored by its one-sided coefficients c_0 ... c_K. Negative
// indices are implied by Hermitian symmetry, c_{-k} = conj(c_k).

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace kssync {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Spatial period, truncation order and time discretization of a run.
struct DomainConfig {
  double X = 120.0;
  int K = 32;
  double h = 0.005;
  double T = 100.0;

  double omega0() const { return 2.0 * std::numbers::pi / X; }
  /// Number of Euler steps covering [0, T].
  long steps() const;
  /// Throws std::invalid_argument when X, K, h or T is out of range.
  void validate() const;
};

/// KS coefficients theta = (alpha, beta, gamma).
struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double operator[](int i) const { return i == 0 ? alpha : (i == 1 ? beta : gamma); }
  double& operator[](int i) { return i == 0 ? alpha : (i == 1 ? beta : gamma); }
  bool operator==(const ModelParams&) const = default;
};

/// One-sided coefficient vector c_0 ... c_K of a real periodic field.
///
/// The imaginary part of c_0 is kept at exactly zero by every mutating
/// entry point of this class.
class SpectralCoefficients {
 public:
  SpectralCoefficients() : c_(ComplexVector::Zero(1)) {}
  explicit SpectralCoefficients(int K) : c_(ComplexVector::Zero(K + 1)) {}
  explicit SpectralCoefficients(ComplexVector c);
  SpectralCoefficients(std::initializer_list<Complex> c);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  std::size_t size() const { return static_cast<std::size_t>(c_.size()); }

  /// c_k for 0 <= k <= K, conj(c_{-k}) for k < 0, zero for |k| > K.
  Complex at(int k) const {
    const int a = k < 0 ? -k : k;
    if (a > order()) return {0.0, 0.0};
    return k < 0 ? std::conj(c_[a]) : c_[a];
  }

  Complex operator[](int k) const { return c_[k]; }
  void set(int k, Complex v) {
    c_[k] = v;
    if (k == 0) c_[0].imag(0.0);
  }

  const ComplexVector& vec() const { return c_; }

  /// Adds step * delta componentwise and re-zeros Im(c_0).
  void axpy(double step, const ComplexVector& delta);

  /// Copy truncated (or zero-padded) to order K.
  SpectralCoefficients resized(int K) const;

  /// Mean field power |c_0|^2 + 2 sum_{k>=1} |c_k|^2.
  double power() const;
  double max_abs() const;

  bool operator==(const SpectralCoefficients& o) const {
    return c_.size() == o.c_.size() && c_ == o.c_;
  }

 private:
  ComplexVector c_;
};

/// Free-function form of SpectralCoefficients::at.
inline Complex coeff_at(const SpectralCoefficients& c, int k) { return c.at(k); }

/// Diagonal of the linear operator: alpha w^2 k^2 + i beta w^3 k^3 - gamma w^4 k^4.
ComplexVector linear_diag(const ModelParams& theta, double omega0, int K);

/// [eta(c)]_k = k * sum_{l=-K..K} c_l c_{k-l}, for k = 0 ... K.
///
/// Terms with |k - l| > K are zero; no dealiasing beyond the truncation.
ComplexVector nonlinear_term(const SpectralCoefficients& c);

/// Field values c_0 + sum_k 2 Re(c_k exp(i w0 k x)) at positions xs.
std::vector<double> synthesize_field(const SpectralCoefficients& c, std::span<const double> xs,
                                     double X);

/// Precomputed exp(i w0 k x_j) table for repeated synthesis on a fixed grid.
class SynthesisTable {
 public:
  SynthesisTable(std::span<const double> xs, double X, int K);

  int order() const { return static_cast<int>(basis_.cols()) - 1; }
  std::size_t points() const { return static_cast<std::size_t>(basis_.rows()); }

  /// Modes of c above order() are ignored; missing modes read as zero.
  RealVector synthesize(const SpectralCoefficients& c) const;

 private:
  ComplexMatrix basis_;  // J x (K+1)
};

}  // namespace kssync
