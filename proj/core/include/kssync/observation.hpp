#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kssync/spectral.hpp"

namespace kssync {

/// Random engine used for observation noise. One per run.
using NoiseEngine = std::mt19937_64;

enum class NoiseMode { off, fixed_sigma, target_snr };

struct NoiseConfig {
  NoiseMode mode = NoiseMode::off;
  double sigma = 0.0;    // fixed_sigma
  double snr_db = 12.0;  // target_snr
  std::uint64_t seed = 0;

  void validate() const;
  /// Per-sample standard deviation given the mean signal power of the observed field.
  double resolve_sigma(double signal_power) const;
};

/// Sampling grid, design matrix and precomputed least-squares operator for
/// recovering c_0 ... c_K from J real samples.
///
/// Columns of the design matrix are phi_{-K} ... phi_0 ... phi_K, with
/// phi_m(x) = exp(i w0 m x); phi_{-k} = conj(phi_k).
class ObservationSetup {
 public:
  /// Throws std::invalid_argument for J < 2K+1, out-of-range grid points or
  /// a singular normal matrix (degenerate grid).
  ObservationSetup(std::vector<double> grid, int K_fit, double X);

  const std::vector<double>& grid() const { return grid_; }
  int order() const { return K_; }
  double period() const { return X_; }
  std::size_t points() const { return grid_.size(); }
  const ComplexMatrix& design() const { return design_; }
  const ComplexMatrix& ls_operator() const { return ls_; }

  /// Two-sided LS solution (entries ordered -K ... K).
  ComplexVector solve_two_sided(const RealVector& u) const;

 private:
  std::vector<double> grid_;
  int K_;
  double X_;
  ComplexMatrix design_;  // J x (2K+1)
  ComplexMatrix ls_;      // (2K+1) x J
};

/// x_j = j * X / J for j = 0 ... J-1.
std::vector<double> uniform_grid(std::size_t J, double X);

ObservationSetup build_setup(std::vector<double> grid, int K_fit, double X);

/// sqrt(power / 10^(snr_db / 10)).
double calibrate_sigma(double trajectory_power, double snr_db);

/// Grid samples of the field plus i.i.d. N(0, sigma^2) noise.
RealVector observe(const SpectralCoefficients& c_master, const SynthesisTable& table, double sigma,
                   NoiseEngine& rng);

/// Convenience overload synthesizing on setup.grid() and resolving sigma from
/// the noise configuration (target_snr uses the power of c_master itself).
RealVector observe(const SpectralCoefficients& c_master, const ObservationSetup& setup,
                   const NoiseConfig& noise, NoiseEngine& rng);

/// Applies the LS operator and folds to one-sided form:
/// a_k = (x_k + conj(x_{-k})) / 2, Im(a_0) = 0.
SpectralCoefficients ls_fit(const ObservationSetup& setup, const RealVector& u);

}  // namespace kssync
