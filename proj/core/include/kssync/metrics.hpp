#pragma once

#include <array>
#include <span>
#include <vector>

#include "kssync/spectral.hpp"

namespace kssync {

using ParamError = std::array<double, 3>;

/// Time-indexed synchronization/estimation record of one run.
struct RunTrace {
  std::vector<double> times;
  std::vector<double> normalized_mse;
  std::vector<double> cost;
  std::vector<ModelParams> theta_hat;
  std::vector<ParamError> param_sq_err;

  std::size_t size() const { return times.size(); }
  void reserve(std::size_t n);
  void push(double t, double e2, double c, const ModelParams& th, const ParamError& err);
};

/// e_k = a_k - b_k with modes beyond either truncation read as zero.
/// The result has order max(M, K); above the slave order e_k = a_k.
SpectralCoefficients error_coeffs(const SpectralCoefficients& a_master,
                                  const SpectralCoefficients& b_slave);

/// Error power over master power, both via Parseval. Throws on zero master power.
double normalized_mse(const SpectralCoefficients& e, const SpectralCoefficients& a_master);

/// sum_{k>=0} |e_k|^2.
double cost_C(const SpectralCoefficients& e);

/// (theta_hat_i - theta_i)^2, optionally divided by theta_i^2.
/// Throws std::invalid_argument when normalizing by a zero component.
ParamError param_sq_err(const ModelParams& theta_hat, const ModelParams& theta, bool normalized);

/// Normalized where theta_i != 0, raw where theta_i == 0.
ParamError param_sq_err_mixed(const ModelParams& theta_hat, const ModelParams& theta);

/// Trapezoid mean of series over the final `fraction` of the time span.
double tail_average(std::span<const double> series, std::span<const double> times, double fraction);

}  // namespace kssync
