#include "kssync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kssync {

void RunTrace::reserve(std::size_t n) {
  times.reserve(n);
  normalized_mse.reserve(n);
  cost.reserve(n);
  theta_hat.reserve(n);
  param_sq_err.reserve(n);
}

void RunTrace::push(double t, double e2, double c, const ModelParams& th, const ParamError& err) {
  times.push_back(t);
  normalized_mse.push_back(e2);
  cost.push_back(c);
  theta_hat.push_back(th);
  param_sq_err.push_back(err);
}

SpectralCoefficients error_coeffs(const SpectralCoefficients& a_master,
                                  const SpectralCoefficients& b_slave) {
  const int M = a_master.order();
  const int K = b_slave.order();
  ComplexVector e = ComplexVector::Zero(std::max(M, K) + 1);
  e.head(M + 1) = a_master.vec();
  e.head(K + 1) -= b_slave.vec();
  return SpectralCoefficients(std::move(e));
}

double normalized_mse(const SpectralCoefficients& e, const SpectralCoefficients& a_master) {
  const double p = a_master.power();
  if (!(p > 0.0)) throw std::invalid_argument("normalized_mse: master field has zero power");
  return e.power() / p;
}

double cost_C(const SpectralCoefficients& e) { return e.vec().squaredNorm(); }

ParamError param_sq_err(const ModelParams& theta_hat, const ModelParams& theta, bool normalized) {
  ParamError out{};
  for (int i = 0; i < 3; ++i) {
    double d = theta_hat[i] - theta[i];
    if (normalized) {
      if (theta[i] == 0.0) throw std::invalid_argument("param_sq_err: normalization by zero parameter");
      d /= theta[i];
    }
    out[i] = d * d;
  }
  return out;
}

ParamError param_sq_err_mixed(const ModelParams& theta_hat, const ModelParams& theta) {
  ParamError out{};
  for (int i = 0; i < 3; ++i) {
    double d = theta_hat[i] - theta[i];
    if (theta[i] != 0.0) d /= theta[i];
    out[i] = d * d;
  }
  return out;
}

double tail_average(std::span<const double> series, std::span<const double> times, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("tail fraction must be in (0, 1]");
  if (series.size() != times.size() || series.empty())
    throw std::invalid_argument("tail_average: series/times length mismatch or empty");
  if (series.size() == 1) return series[0];

  const double t0 = times.front();
  const double t1 = times.back();
  const double start = t1 - fraction * (t1 - t0);
  if (!(t1 > t0)) return series.back();

  // Linear interpolation for the partial first interval.
  auto it = std::upper_bound(times.begin(), times.end(), start);
  std::size_t i = static_cast<std::size_t>(it - times.begin());
  if (i == 0) i = 1;
  const double ta = times[i - 1], tb = times[i];
  const double w = (tb > ta) ? (start - ta) / (tb - ta) : 0.0;
  double prev_v = series[i - 1] + std::clamp(w, 0.0, 1.0) * (series[i] - series[i - 1]);
  double prev_t = std::max(start, ta);

  double acc = 0.0;
  for (; i < series.size(); ++i) {
    acc += 0.5 * (prev_v + series[i]) * (times[i] - prev_t);
    prev_v = series[i];
    prev_t = times[i];
  }
  return acc / (t1 - start);
}

}  // namespace kssync
