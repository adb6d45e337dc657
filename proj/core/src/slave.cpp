#include "kssync/slave.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "kssync/master.hpp"

namespace kssync {

CouplingMatrix CouplingMatrix::scalar(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("coupling constant must be finite");
  CouplingMatrix c;
  c.d_ = d;
  return c;
}

CouplingMatrix CouplingMatrix::dense(ComplexMatrix D) {
  if (D.rows() != D.cols()) throw std::invalid_argument("dense coupling must be square");
  CouplingMatrix c;
  c.dense_ = std::move(D);
  return c;
}

ComplexVector CouplingMatrix::apply(const ComplexVector& v) const {
  if (is_scalar()) return d_ * v;
  if (dense_->cols() != v.size()) throw std::invalid_argument("coupling size mismatch");
  return *dense_ * v;
}

ComplexMatrix CouplingMatrix::matrix(int K) const {
  if (is_scalar()) return ComplexMatrix::Identity(K + 1, K + 1) * d_;
  if (dense_->rows() != K + 1) throw std::invalid_argument("coupling size mismatch");
  return *dense_;
}

SlaveState SlaveState::initial(SpectralCoefficients b0, ModelParams theta_hat0, CouplingMatrix coupling,
                               double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("adaptation rate mu must be >= 0");
  SlaveState s;
  s.b_prev = b0;
  s.bdot_prev = ComplexVector::Zero(b0.vec().size());
  s.b = std::move(b0);
  s.theta_hat = theta_hat0;
  s.coupling = std::move(coupling);
  s.mu = mu;
  s.step_index = 0;
  return s;
}

ComplexVector slave_rhs(const SpectralCoefficients& b, const SpectralCoefficients& a_hat,
                        const ModelParams& theta, const CouplingMatrix& coupling, double omega0) {
  if (a_hat.order() != b.order()) throw std::invalid_argument("slave_rhs: a_hat and b orders differ");
  ComplexVector rhs = master_rhs(b, theta, omega0);
  rhs += coupling.apply(a_hat.vec() - b.vec());
  return rhs;
}

Eigen::Matrix<Complex, 3, Eigen::Dynamic> build_sensitivity(const SpectralCoefficients& b_prev,
                                                            double omega0) {
  const int K = b_prev.order();
  Eigen::Matrix<Complex, 3, Eigen::Dynamic> M(3, K + 1);
  for (int k = 0; k <= K; ++k) {
    const double wk = omega0 * k;
    const double wk2 = wk * wk;
    const Complex bc = std::conj(b_prev[k]);
    M(0, k) = bc * wk2;
    M(1, k) = bc * Complex(0.0, -wk2 * wk);
    M(2, k) = bc * (-wk2 * wk2);
  }
  return M;
}

ParamRate parameter_rhs(const SlaveState& state, const SpectralCoefficients& a_hat, double h,
                        double omega0) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (state.mu == 0.0) return {0.0, 0.0, 0.0};
  const int K = state.b_prev.order();
  if (a_hat.order() != K) throw std::invalid_argument("parameter_rhs: order mismatch");

  const ComplexVector& bp = state.b_prev.vec();
  const ComplexVector& av = a_hat.vec();
  double ga = 0.0, gb = 0.0, gg = 0.0;
  for (int k = 1; k <= K; ++k) {
    const Complex v = av[k] - bp[k] - h * state.bdot_prev[k];
    const Complex w = std::conj(bp[k]) * v;
    const double wk = omega0 * k;
    const double wk2 = wk * wk;
    // Re{conj(b) v * c} for c = w^2k^2, -i w^3k^3, -w^4k^4.
    ga += wk2 * w.real();
    gb += wk2 * wk * w.imag();
    gg -= wk2 * wk2 * w.real();
  }
  const double s = state.mu * h;
  return {s * ga, s * gb, s * gg};
}

void adaptive_step_inplace(SlaveState& state, const SpectralCoefficients& a_hat, double h,
                           double omega0) {
  ComplexVector bdot = slave_rhs(state.b, a_hat, state.theta_hat, state.coupling, omega0);
  const ParamRate dtheta = parameter_rhs(state, a_hat, h, omega0);

  state.b_prev = state.b;
  state.b.axpy(h, bdot);
  for (int i = 0; i < 3; ++i) state.theta_hat[i] += h * dtheta[i];
  state.bdot_prev = std::move(bdot);
  ++state.step_index;

  if (!(state.b.max_abs() <= kDivergenceThreshold) ||
      !std::isfinite(state.theta_hat.alpha + state.theta_hat.beta + state.theta_hat.gamma))
    throw DivergenceError("slave", state.step_index);
}

SlaveState adaptive_step(const SlaveState& state, const SpectralCoefficients& a_hat, double h,
                         double omega0) {
  SlaveState next = state;
  adaptive_step_inplace(next, a_hat, h, omega0);
  return next;
}

ComplexMatrix error_jacobian(const SpectralCoefficients& a_bar, const ModelParams& theta,
                             const CouplingMatrix& coupling, double omega0) {
  const int K = a_bar.order();
  ComplexMatrix J = ComplexMatrix::Zero(K + 1, K + 1);
  J.diagonal() = linear_diag(theta, omega0, K);
  // d/de_j of (i w0 / 2) eta(a - e)_k = -i w0 k a_{k-j}; row 0 vanishes.
  for (int k = 1; k <= K; ++k)
    for (int j = 0; j <= K; ++j) J(k, j) -= Complex(0.0, omega0 * k) * a_bar.at(k - j);
  J -= coupling.matrix(K);
  return J;
}

std::vector<double> jacobian_spectrum_real(const ComplexMatrix& J) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(J, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver failed");
  std::vector<double> re(static_cast<std::size_t>(J.rows()));
  for (Eigen::Index i = 0; i < J.rows(); ++i) re[i] = es.eigenvalues()[i].real();
  std::sort(re.begin(), re.end(), std::greater<>());
  return re;
}

}  // namespace kssync
