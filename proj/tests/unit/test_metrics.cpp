#include "doctest.h"
#include "test_support.hpp"

#include "kssync/metrics.hpp"

using namespace kssync;
using namespace kssync::testing;

TEST_CASE("error_coeffs") {
  SUBCASE("same order") {
    const SpectralCoefficients e = error_coeffs(SpectralCoefficients{1.0, 2.0}, SpectralCoefficients{0.5, 2.0});
    CHECK(e.order() == 1);
    CHECK(e[0] == Complex(0.5, 0.0));
    CHECK(e[1] == Complex(0.0, 0.0));
  }
  SUBCASE("unresolved master modes count fully") {
    const SpectralCoefficients e = error_coeffs(SpectralCoefficients{0.0, 1.0, 3.0}, SpectralCoefficients{0.0, 1.0});
    CHECK(e.order() == 2);
    CHECK(e[2] == Complex(3.0, 0.0));
  }
  SUBCASE("slave modes beyond the master order") {
    const SpectralCoefficients e = error_coeffs(SpectralCoefficients{0.0, 1.0}, SpectralCoefficients{0.0, 1.0, 0.25});
    CHECK(e.order() == 2);
    CHECK(e[2] == Complex(-0.25, 0.0));
  }
}

TEST_CASE("normalized_mse") {
  SUBCASE("examples") {
    const SpectralCoefficients a{0.0, 1.0};
    CHECK(normalized_mse(SpectralCoefficients{0.0, 0.0}, a) == 0.0);
    CHECK(normalized_mse(error_coeffs(a, SpectralCoefficients{0.0, 0.0}), a) == doctest::Approx(1.0));
    CHECK(normalized_mse(SpectralCoefficients{0.0, 0.5}, a) == doctest::Approx(0.25));
  }
  SUBCASE("zero master power is an error") {
    CHECK_THROWS_AS(normalized_mse(SpectralCoefficients{0.0, 1.0}, SpectralCoefficients{0.0, 0.0}),
                    std::invalid_argument);
  }
  SUBCASE("agrees with a spatial quadrature of the fields") {
    std::mt19937_64 rng(1);
    const double X = 50.0;
    for (int rep = 0; rep < 4; ++rep) {
      const SpectralCoefficients a = random_hermitian(10, rng), b = random_hermitian(10, rng);
      auto sq = [](const SpectralCoefficients& c, double X) {
        return [&c, X](double x) {
          const double v = two_sided_field(c.vec(), x, X).real();
          return v * v;
        };
      };
      const SpectralCoefficients e = error_coeffs(a, b);
      const double num = periodic_mean_trapezoid(sq(e, X), X, 100);
      const double den = periodic_mean_trapezoid(sq(a, X), X, 100);
      CHECK(rel_err(normalized_mse(e, a), num / den) < 1e-10);
    }
  }
}

TEST_CASE("cost_C") {
  CHECK(cost_C(SpectralCoefficients{{1.0, 0.0}, {0.0, 2.0}}) == doctest::Approx(5.0));
  CHECK(cost_C(SpectralCoefficients(3)) == 0.0);
}

TEST_CASE("param_sq_err") {
  const ModelParams truth{1.15, -0.05, 0.98};
  SUBCASE("exact estimate") {
    CHECK(param_sq_err(truth, truth, true) == ParamError{0, 0, 0});
  }
  SUBCASE("normalized") {
    const ParamError e = param_sq_err({1.265, -0.05, 0.98}, truth, true);
    CHECK(e[0] == doctest::Approx(0.01));
    CHECK(e[1] == 0.0);
  }
  SUBCASE("raw") {
    const ParamError e = param_sq_err({1.0, 0.0, 0.0}, {0.0, 0.0, 2.0}, false);
    CHECK(e == ParamError{1.0, 0.0, 4.0});
  }
  SUBCASE("normalizing by zero") {
    CHECK_THROWS_AS(param_sq_err({1, 1, 1}, {1, 0, 1}, true), std::invalid_argument);
  }
  SUBCASE("mixed falls back to raw only for zero components") {
    const ParamError e = param_sq_err_mixed({2.0, 0.3, 1.0}, {1.0, 0.0, 2.0});
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(0.09));
    CHECK(e[2] == doctest::Approx(0.25));
  }
}

TEST_CASE("tail_average") {
  SUBCASE("constant series") {
    const std::vector<double> t{0, 1, 2, 3}, v{2, 2, 2, 2};
    CHECK(tail_average(v, t, 0.5) == doctest::Approx(2.0));
  }
  SUBCASE("linear ramp: mean over the final fifth") {
    std::vector<double> t, v;
    for (int i = 0; i <= 100; ++i) {
      t.push_back(i);
      v.push_back(i);
    }
    CHECK(tail_average(v, t, 0.2) == doctest::Approx(90.0));
  }
  SUBCASE("tail start between samples") {
    const std::vector<double> t{0, 1, 2}, v{0, 1, 2};
    // Tail is [1.5, 2]; mean of the ramp there is 1.75.
    CHECK(tail_average(v, t, 0.25) == doctest::Approx(1.75));
  }
  SUBCASE("quadratic against its exact integral") {
    std::vector<double> t, v;
    for (int i = 0; i <= 1000; ++i) {
      const double x = 0.01 * i;
      t.push_back(x);
      v.push_back(x * x);
    }
    // (1/2) * integral_8^10 x^2 dx = (1000 - 512) / 6.
    CHECK(tail_average(v, t, 0.2) == doctest::Approx(488.0 / 6.0).epsilon(1e-5));
  }
  SUBCASE("invalid arguments") {
    const std::vector<double> t{0, 1}, v{0};
    CHECK_THROWS_AS(tail_average(v, t, 0.5), std::invalid_argument);
    const std::vector<double> v2{0, 1};
    CHECK_THROWS_AS(tail_average(v2, t, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tail_average(v2, t, 1.5), std::invalid_argument);
  }
}

TEST_CASE("RunTrace columns stay aligned") {
  RunTrace tr;
  tr.push(0.0, 1.0, 2.0, {1, 2, 3}, {0, 0, 0});
  tr.push(0.1, 0.5, 1.0, {1, 2, 3}, {0, 0, 0});
  CHECK(tr.size() == 2);
  CHECK(tr.normalized_mse.size() == 2);
  CHECK(tr.cost.size() == 2);
  CHECK(tr.theta_hat.size() == 2);
  CHECK(tr.param_sq_err.size() == 2);
}
