#include "doctest.h"
#include "test_support.hpp"

#include <Eigen/QR>

#include "kssync/observation.hpp"

using namespace kssync;
using namespace kssync::testing;

TEST_CASE("ObservationSetup construction") {
  SUBCASE("full-size grid gives a left inverse") {
    const ObservationSetup s = build_setup(uniform_grid(120, 120.0), 32, 120.0);
    CHECK(s.design().rows() == 120);
    CHECK(s.design().cols() == 65);
    const ComplexMatrix I = s.ls_operator() * s.design();
    CHECK((I - ComplexMatrix::Identity(65, 65)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("too few points") {
    CHECK_THROWS_AS(build_setup(uniform_grid(64, 120.0), 32, 120.0), std::invalid_argument);
  }
  SUBCASE("points outside the period") {
    CHECK_THROWS_AS(build_setup({0.0, 1.0, 120.0}, 1, 120.0), std::invalid_argument);
    CHECK_THROWS_AS(build_setup({-0.1, 1.0, 2.0}, 1, 120.0), std::invalid_argument);
  }
  SUBCASE("duplicated points are degenerate") {
    CHECK_THROWS_AS(build_setup({1.0, 1.0, 1.0, 1.0, 1.0}, 2, 10.0), std::invalid_argument);
  }
  SUBCASE("uniform grid values") {
    const auto g = uniform_grid(4, 4.0);
    CHECK(g == std::vector<double>{0.0, 1.0, 2.0, 3.0});
  }
}

TEST_CASE("ls_fit examples") {
  SUBCASE("hand case J = 4") {
    const ObservationSetup s = build_setup(uniform_grid(4, 4.0), 1, 4.0);
    RealVector u(4);
    u << 2, 0, -2, 0;
    const SpectralCoefficients a = ls_fit(s, u);
    CHECK(std::abs(a[0]) < 1e-14);
    CHECK(std::abs(a[1] - Complex(1.0, 0.0)) < 1e-14);
  }
  SUBCASE("constant") {
    const ObservationSetup s = build_setup(uniform_grid(9, 9.0), 4, 9.0);
    const SpectralCoefficients a = ls_fit(s, RealVector::Constant(9, 3.0));
    CHECK(std::abs(a[0] - 3.0) < 1e-13);
    CHECK(a.vec().tail(4).norm() < 1e-13);
  }
  SUBCASE("exact recovery when K_fit >= K_true") {
    std::mt19937_64 rng(4);
    for (int K : {4, 10, 32}) {
      const SpectralCoefficients c = random_hermitian(K, rng);
      const ObservationSetup s = build_setup(uniform_grid(2 * K + 11, 50.0), K + 3, 50.0);
      const SynthesisTable tab(s.grid(), 50.0, K);
      const SpectralCoefficients a = ls_fit(s, tab.synthesize(c));
      for (int k = 0; k <= K + 3; ++k) CHECK(std::abs(a[k] - c.at(k)) < 1e-10);
    }
  }
  SUBCASE("two-sided solution is conjugate-consistent for real input") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    const ObservationSetup s = build_setup(uniform_grid(40, 10.0), 6, 10.0);
    RealVector u(40);
    for (auto& v : u) v = n(rng);
    const ComplexVector x = s.solve_two_sided(u);
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(x[6 + k] - std::conj(x[6 - k])) < 1e-12);
    CHECK(std::abs(x[6].imag()) < 1e-12);
  }
}

TEST_CASE("ls_fit against an independent real least-squares solve") {
  // Truncated fit (K_fit = 32) of an M = 64 field on a non-uniform grid.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(0.0, 120.0);
  std::vector<double> grid(150);
  for (auto& x : grid) x = ux(rng);
  const SpectralCoefficients c = random_hermitian(64, rng);
  const ObservationSetup s = build_setup(grid, 32, 120.0);
  const SynthesisTable tab(grid, 120.0, 64);
  const RealVector u = tab.synthesize(c);
  const SpectralCoefficients a = ls_fit(s, u);

  // Real basis 1, 2cos(w k x), -2sin(w k x) with coefficients a0, Re a_k, Im a_k.
  const double w = 2.0 * std::numbers::pi / 120.0;
  RealMatrix B(150, 65);
  for (int j = 0; j < 150; ++j) {
    B(j, 0) = 1.0;
    for (int k = 1; k <= 32; ++k) {
      B(j, 2 * k - 1) = 2.0 * std::cos(w * k * grid[j]);
      B(j, 2 * k) = -2.0 * std::sin(w * k * grid[j]);
    }
  }
  const RealVector z = B.colPivHouseholderQr().solve(u);
  CHECK(std::abs(a[0].real() - z[0]) < 1e-8);
  for (int k = 1; k <= 32; ++k) {
    CHECK(std::abs(a[k].real() - z[2 * k - 1]) < 1e-8);
    CHECK(std::abs(a[k].imag() - z[2 * k]) < 1e-8);
  }
}

TEST_CASE("ls_fit properties") {
  const ObservationSetup s = build_setup(uniform_grid(30, 15.0), 5, 15.0);
  const SynthesisTable tab(s.grid(), 15.0, 5);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;

  SUBCASE("idempotent projection") {
    RealVector u(30);
    for (auto& v : u) v = n(rng);
    const SpectralCoefficients a1 = ls_fit(s, u);
    const SpectralCoefficients a2 = ls_fit(s, tab.synthesize(a1));
    CHECK((a1.vec() - a2.vec()).norm() < 1e-12);
  }
  SUBCASE("unbiased under zero-mean noise") {
    const SpectralCoefficients c = random_hermitian(5, rng);
    const RealVector clean = tab.synthesize(c);
    ComplexVector acc = ComplexVector::Zero(6);
    const int trials = 20000;
    const double sigma = 0.5;
    for (int t = 0; t < trials; ++t) {
      RealVector u = clean;
      for (auto& v : u) v += sigma * n(rng);
      acc += ls_fit(s, u).vec();
    }
    acc /= trials;
    // Per-coefficient std of the mean is about sigma / sqrt(2 J trials) ~ 6e-4.
    CHECK((acc - c.vec()).cwiseAbs().maxCoeff() < 5e-3);
  }
}

TEST_CASE("noise model") {
  SUBCASE("calibrate_sigma examples") {
    CHECK(calibrate_sigma(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(calibrate_sigma(2.69, 12.0) == doctest::Approx(0.412).epsilon(1e-3));
    CHECK(calibrate_sigma(10.0, 10.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(calibrate_sigma(0.0, 12.0), std::invalid_argument);
  }
  SUBCASE("noise off reproduces the field") {
    std::mt19937_64 rng(1);
    const SpectralCoefficients c = random_hermitian(6, rng);
    const ObservationSetup s = build_setup(uniform_grid(20, 30.0), 6, 30.0);
    NoiseEngine eng(3);
    const RealVector u = observe(c, s, NoiseConfig{}, eng);
    const auto ref = synthesize_field(c, s.grid(), 30.0);
    for (int j = 0; j < 20; ++j) CHECK(u[j] == doctest::Approx(ref[j]).epsilon(1e-13));
  }
  SUBCASE("empirical variance over 1e6 draws") {
    const std::vector<double> grid = uniform_grid(1000, 1.0);
    const SynthesisTable tab(grid, 1.0, 0);
    NoiseEngine eng(42);
    const double sigma = 0.412;
    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < 1000; ++r) {
      const RealVector u = observe(SpectralCoefficients(0), tab, sigma, eng);
      s1 += u.sum();
      s2 += u.squaredNorm();
    }
    const double n = 1e6;
    const double var = s2 / n - (s1 / n) * (s1 / n);
    CHECK(std::abs(var / (sigma * sigma) - 1.0) < 0.01);
    CHECK(std::abs(s1 / n) < 5e-3);
  }
  SUBCASE("target SNR resolves from signal power") {
    NoiseConfig nc;
    nc.mode = NoiseMode::target_snr;
    nc.snr_db = 12.0;
    CHECK(nc.resolve_sigma(2.69) == doctest::Approx(std::sqrt(2.69 / std::pow(10.0, 1.2))));
    nc.mode = NoiseMode::fixed_sigma;
    nc.sigma = 0.3;
    CHECK(nc.resolve_sigma(100.0) == 0.3);
    nc.sigma = -1.0;
    CHECK_THROWS_AS(nc.validate(), std::invalid_argument);
  }
  SUBCASE("fixed engine seed is reproducible") {
    const SynthesisTable tab(uniform_grid(10, 1.0), 1.0, 0);
    NoiseEngine a(9), b(9);
    CHECK(observe(SpectralCoefficients(0), tab, 1.0, a) == observe(SpectralCoefficients(0), tab, 1.0, b));
  }
}
