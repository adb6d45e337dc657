#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kssync/spectral.hpp"

namespace kssync {

/// Coefficient magnitude beyond which a run is declared numerically unstable.
inline constexpr double kDivergenceThreshold = 1e6;

/// Default burn-in horizon used to land on the attractor.
inline constexpr double kDefaultBurnIn = 100.0;

/// Raised when a coefficient (or filter mean) magnitude exceeds kDivergenceThreshold.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what + " diverged at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct MasterTrajectory {
  std::vector<double> times;
  std::vector<SpectralCoefficients> coeffs;
  long store_stride = 1;
};

/// Right-hand side of the truncated master ODE:
/// Psi(theta) c - (i w0 / 2) eta(c). Entry 0 is exactly zero.
ComplexVector master_rhs(const SpectralCoefficients& c, const ModelParams& theta, double omega0);

/// c + h * rhs, with Im(c_0) reset to zero.
SpectralCoefficients euler_step(const SpectralCoefficients& c, const ComplexVector& rhs, double h);

/// Largest h * |Re Psi_kk| over k = 0 ... K; explicit Euler needs this below 2.
double euler_stiffness(const ModelParams& theta, const DomainConfig& cfg);

/// Throws std::invalid_argument when the explicit Euler step is outside its
/// stability envelope for the linear part of the dynamics.
void check_euler_stability(const ModelParams& theta, const DomainConfig& cfg, double extra_damping = 0.0);

/// Canonical seed state: c_1 = 0.5, everything else zero.
SpectralCoefficients seed_state(int K);

/// Integrates the master from seed_state(cfg.K) for burn_T time units and
/// returns the terminal coefficients.
SpectralCoefficients burn_in_init(const ModelParams& theta, const DomainConfig& cfg,
                                  double burn_T = kDefaultBurnIn);

/// Euler integration over cfg.steps() steps, keeping every store_stride-th
/// snapshot together with t = 0 and the final step.
MasterTrajectory simulate_master(const SpectralCoefficients& c0, const ModelParams& theta,
                                 const DomainConfig& cfg, long store_stride = 1);

}  // namespace kssync
