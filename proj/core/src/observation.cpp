#include "kssync/observation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace kssync {

void NoiseConfig::validate() const {
  switch (mode) {
    case NoiseMode::off:
      break;
    case NoiseMode::fixed_sigma:
      if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("noise sigma must be finite and >= 0");
      break;
    case NoiseMode::target_snr:
      if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
      break;
  }
}

double NoiseConfig::resolve_sigma(double signal_power) const {
  switch (mode) {
    case NoiseMode::off:
      return 0.0;
    case NoiseMode::fixed_sigma:
      return sigma;
    case NoiseMode::target_snr:
      return calibrate_sigma(signal_power, snr_db);
  }
  return 0.0;
}

std::vector<double> uniform_grid(std::size_t J, double X) {
  std::vector<double> g(J);
  for (std::size_t j = 0; j < J; ++j) g[j] = X * static_cast<double>(j) / static_cast<double>(J);
  return g;
}

ObservationSetup::ObservationSetup(std::vector<double> grid, int K_fit, double X)
    : grid_(std::move(grid)), K_(K_fit), X_(X) {
  if (K_ < 0) throw std::invalid_argument("K_fit must be >= 0");
  if (!(X_ > 0.0)) throw std::invalid_argument("X must be positive");
  const auto J = static_cast<Eigen::Index>(grid_.size());
  const Eigen::Index n = 2 * K_ + 1;
  if (J < n)
    throw std::invalid_argument("need J >= 2K+1 grid points (J=" + std::to_string(J) +
                                ", K=" + std::to_string(K_) + ")");
  for (double x : grid_)
    if (!(x >= 0.0 && x < X_)) throw std::invalid_argument("grid point outside [0, X)");

  const double w0 = 2.0 * std::numbers::pi / X_;
  design_.resize(J, n);
  for (Eigen::Index j = 0; j < J; ++j)
    for (int m = -K_; m <= K_; ++m) design_(j, m + K_) = std::polar(1.0, w0 * m * grid_[j]);

  const ComplexMatrix normal = design_.adjoint() * design_;
  Eigen::FullPivLU<ComplexMatrix> lu(normal);
  // Relative rank threshold; duplicated points or aliased grids fall below it.
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) throw std::invalid_argument("degenerate observation grid: singular normal matrix");
  ls_ = lu.solve(design_.adjoint());
}

ComplexVector ObservationSetup::solve_two_sided(const RealVector& u) const {
  if (u.size() != static_cast<Eigen::Index>(grid_.size()))
    throw std::invalid_argument("observation length does not match grid");
  return ls_ * u.cast<Complex>();
}

ObservationSetup build_setup(std::vector<double> grid, int K_fit, double X) {
  return ObservationSetup(std::move(grid), K_fit, X);
}

double calibrate_sigma(double trajectory_power, double snr_db) {
  if (!(trajectory_power > 0.0)) throw std::invalid_argument("trajectory power must be positive");
  return std::sqrt(trajectory_power / std::pow(10.0, snr_db / 10.0));
}

RealVector observe(const SpectralCoefficients& c_master, const SynthesisTable& table, double sigma,
                   NoiseEngine& rng) {
  RealVector u = table.synthesize(c_master);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] += noise(rng);
  }
  return u;
}

RealVector observe(const SpectralCoefficients& c_master, const ObservationSetup& setup,
                   const NoiseConfig& noise, NoiseEngine& rng) {
  const SynthesisTable table(setup.grid(), setup.period(), c_master.order());
  return observe(c_master, table, noise.resolve_sigma(c_master.power()), rng);
}

SpectralCoefficients ls_fit(const ObservationSetup& setup, const RealVector& u) {
  const ComplexVector two = setup.solve_two_sided(u);
  const int K = setup.order();
  ComplexVector one(K + 1);
  one[0] = Complex(two[K].real(), 0.0);
  for (int k = 1; k <= K; ++k) one[k] = 0.5 * (two[K + k] + std::conj(two[K - k]));
  return SpectralCoefficients(std::move(one));
}

}  // namespace kssync
