#pragma once

#include <array>
#include <optional>

#include "kssync/spectral.hpp"

namespace kssync {

/// Coupling D in the slave term D (a_hat - b): either d * I or a dense
/// (K+1) x (K+1) complex matrix.
class CouplingMatrix {
 public:
  static CouplingMatrix scalar(double d);
  static CouplingMatrix dense(ComplexMatrix D);

  bool is_scalar() const { return !dense_.has_value(); }
  double scalar_value() const { return d_; }
  const ComplexMatrix& dense_matrix() const { return *dense_; }

  /// D * v.
  ComplexVector apply(const ComplexVector& v) const;
  /// Materialized (K+1) x (K+1) matrix.
  ComplexMatrix matrix(int K) const;

 private:
  double d_ = 0.0;
  std::optional<ComplexMatrix> dense_;
};

struct SlaveState {
  SpectralCoefficients b;
  ModelParams theta_hat;
  SpectralCoefficients b_prev;  // b(t - h)
  ComplexVector bdot_prev;      // db/dt at t - h
  CouplingMatrix coupling = CouplingMatrix::scalar(1.0);
  double mu = 0.0;
  long step_index = 0;

  /// State at step 0: b_prev = b, bdot_prev = 0.
  static SlaveState initial(SpectralCoefficients b0, ModelParams theta_hat0, CouplingMatrix coupling,
                            double mu);
};

/// Psi(theta) b - (i w0 / 2) eta(b) + D (a_hat - b).
ComplexVector slave_rhs(const SpectralCoefficients& b, const SpectralCoefficients& a_hat,
                        const ModelParams& theta, const CouplingMatrix& coupling, double omega0);

/// 3 x (K+1) sensitivity matrix with column k = conj(b_k) [w^2 k^2, -i w^3 k^3, -w^4 k^4]^T,
/// so that M^H theta = Psi(theta) b for real theta.
Eigen::Matrix<Complex, 3, Eigen::Dynamic> build_sensitivity(const SpectralCoefficients& b_prev,
                                                            double omega0);

using ParamRate = std::array<double, 3>;

/// Parameter derivative of the adaptive slave,
///
///   d theta_hat / dt = mu h Re{ M(b_prev) [a_hat - b_prev - h bdot_prev] },
///
/// i.e. -mu/2 times the gradient of the one-step linearized cost
/// ||a_hat - b_prev - h bdot_prev(theta_hat)||^2.
ParamRate parameter_rhs(const SlaveState& state, const SpectralCoefficients& a_hat, double h,
                        double omega0);

/// One Euler step of the coupled coefficient/parameter system. The parameter
/// derivative uses the lagged cache (b_prev, bdot_prev), not the fresh rhs.
SlaveState adaptive_step(const SlaveState& state, const SpectralCoefficients& a_hat, double h,
                         double omega0);

/// In-place variant used by the experiment loops.
void adaptive_step_inplace(SlaveState& state, const SpectralCoefficients& a_hat, double h,
                           double omega0);

/// Jacobian of the error dynamics at e = 0:
/// Psi(theta) - i w0 Q(a_bar) - D, with Q_{kj} = k a_bar_{k-j} (row 0 is zero).
ComplexMatrix error_jacobian(const SpectralCoefficients& a_bar, const ModelParams& theta,
                             const CouplingMatrix& coupling, double omega0);

/// Real parts of the eigenvalues of error_jacobian, sorted descending.
std::vector<double> jacobian_spectrum_real(const ComplexMatrix& J);

}  // namespace kssync
