#include "kssync/master.hpp"

#include <cmath>
#include <sstream>

namespace kssync {

ComplexVector master_rhs(const SpectralCoefficients& c, const ModelParams& theta, double omega0) {
  const ComplexVector psi = linear_diag(theta, omega0, c.order());
  ComplexVector rhs = psi.cwiseProduct(c.vec());
  rhs -= Complex(0.0, 0.5 * omega0) * nonlinear_term(c);
  rhs[0] = 0.0;
  return rhs;
}

SpectralCoefficients euler_step(const SpectralCoefficients& c, const ComplexVector& rhs, double h) {
  SpectralCoefficients out = c;
  out.axpy(h, rhs);
  return out;
}

double euler_stiffness(const ModelParams& theta, const DomainConfig& cfg) {
  const ComplexVector psi = linear_diag(theta, cfg.omega0(), cfg.K);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) worst = std::max(worst, std::abs(psi[k].real()));
  return cfg.h * worst;
}

void check_euler_stability(const ModelParams& theta, const DomainConfig& cfg, double extra_damping) {
  const double s = euler_stiffness(theta, cfg) + cfg.h * std::abs(extra_damping);
  if (s >= 2.0) {
    std::ostringstream os;
    os << "explicit Euler unstable: h*|Re Psi| = " << s << " >= 2 (K=" << cfg.K << ", h=" << cfg.h
       << ")";
    throw std::invalid_argument(os.str());
  }
}

SpectralCoefficients seed_state(int K) {
  SpectralCoefficients c(K);
  c.set(1, 0.5);
  return c;
}

SpectralCoefficients burn_in_init(const ModelParams& theta, const DomainConfig& cfg, double burn_T) {
  if (burn_T < 0.0) throw std::invalid_argument("burn_T must be non-negative");
  check_euler_stability(theta, cfg);
  SpectralCoefficients c = seed_state(cfg.K);
  const long n = std::lround(burn_T / cfg.h);
  const double w0 = cfg.omega0();
  for (long i = 0; i < n; ++i) {
    c.axpy(cfg.h, master_rhs(c, theta, w0));
    if (!(c.max_abs() <= kDivergenceThreshold)) throw DivergenceError("burn-in", i + 1);
  }
  return c;
}

MasterTrajectory simulate_master(const SpectralCoefficients& c0, const ModelParams& theta,
                                 const DomainConfig& cfg, long store_stride) {
  if (store_stride < 1) throw std::invalid_argument("store_stride must be >= 1");
  check_euler_stability(theta, cfg);
  MasterTrajectory traj;
  traj.store_stride = store_stride;
  const long n = cfg.steps();
  traj.times.reserve(n / store_stride + 2);
  traj.coeffs.reserve(n / store_stride + 2);

  SpectralCoefficients c = c0;
  traj.times.push_back(0.0);
  traj.coeffs.push_back(c);
  const double w0 = cfg.omega0();
  for (long i = 1; i <= n; ++i) {
    c.axpy(cfg.h, master_rhs(c, theta, w0));
    if (!(c.max_abs() <= kDivergenceThreshold)) throw DivergenceError("master", i);
    if (i % store_stride == 0 || i == n) {
      traj.times.push_back(static_cast<double>(i) * cfg.h);
      traj.coeffs.push_back(c);
    }
  }
  return traj;
}

}  // namespace kssync
