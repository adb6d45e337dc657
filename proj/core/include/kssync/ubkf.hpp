#pragma once

// Cubature Kalman filter over the extended state s = [theta; a_bar] used as a
// statistical baseline for the synchronization estimator.
//
// Complex coefficients are embedded in a real vector of dimension 4 + 2K:
//   [alpha, beta, gamma, a_0, Re a_1, Im a_1, ..., Re a_K, Im a_K].
// Prediction propagates the 2n cubature points through one Euler step of the
// truncated KS dynamics; the update is the linear Kalman update for grid
// samples of the field.

#include <functional>
#include <optional>
#include <vector>

#include "kssync/metrics.hpp"
#include "kssync/observation.hpp"
#include "kssync/spectral.hpp"

namespace kssync {

struct FilterState {
  RealVector mean;
  RealMatrix covariance;
  RealVector process_noise;  // diagonal, per unit time
  double measurement_noise_var = 0.0;

  int order() const { return static_cast<int>((mean.size() - 4) / 2); }
};

struct UbkfOptions {
  double coeff_process_noise = 1e-6;
  double theta_process_noise = 1e-8;
  double prior_var = 1e-2;
  ModelParams theta_prior{0.05, 0.05, 0.05};
  /// Drop the quadratic term from the propagated dynamics (test hook).
  bool nonlinear = true;
};

inline int ubkf_dimension(int K) { return 4 + 2 * K; }

RealVector encode_state(const ModelParams& theta, const SpectralCoefficients& a);
ModelParams decode_params(const RealVector& s);
SpectralCoefficients decode_coeffs(const RealVector& s);

/// Prior state with the diagonal knobs of `opts`.
FilterState make_filter_state(const SpectralCoefficients& a0, double measurement_noise_var,
                              const UbkfOptions& opts = {});

struct CubatureSet {
  std::vector<RealVector> points;
  std::vector<double> weights;
};

/// Degree-3 spherical-radial rule: mean +/- sqrt(n) * S e_i with S S^T = covariance,
/// weights 1/(2n). A failed factorization is retried once with 1e-12 I jitter.
CubatureSet cubature_points(const RealVector& mean, const RealMatrix& covariance);

/// Real J x n measurement matrix mapping the embedded state to grid samples.
RealMatrix measurement_matrix(const std::vector<double>& grid, double X, int K);

/// Prediction/update machinery for a fixed grid and domain.
class CubatureFilter {
 public:
  CubatureFilter(const ObservationSetup& setup, const DomainConfig& cfg, int K, bool nonlinear = true);

  void predict(FilterState& s) const;
  void update(FilterState& s, const RealVector& u_obs) const;
  void step(FilterState& s, const RealVector& u_obs) const {
    predict(s);
    update(s, u_obs);
  }

 private:
  DomainConfig cfg_;
  RealMatrix H_;
  bool nonlinear_;
};

FilterState ubkf_step(const FilterState& state, const RealVector& u_obs, const ObservationSetup& setup,
                      const DomainConfig& cfg);

/// Observation at step i (time i * h); nullopt ends the stream.
using ObservationStream = std::function<std::optional<RealVector>(long step)>;
/// Master coefficients at step i, used only for trace metrics.
using TruthSource = std::function<SpectralCoefficients(long step)>;

struct UbkfResult {
  FilterState final_state;
  RunTrace trace;
};

UbkfResult run_ubkf(const FilterState& init, const ObservationStream& observations,
                    const ObservationSetup& setup, const DomainConfig& cfg, const TruthSource& truth,
                    const ModelParams& theta_true, long trace_stride = 1, bool nonlinear = true);

}  // namespace kssync
