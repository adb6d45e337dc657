#include "doctest.h"

#include "kssync/config.hpp"

using namespace kssync;

TEST_CASE("defaults are a valid sync setup") {
  const ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.domain.X == 120.0);
  CHECK(c.domain.h == 0.005);
  CHECK(c.theta_true.alpha == 1.15);
  CHECK(c.grid_J == 120);
}

TEST_CASE("parse_config") {
  SUBCASE("keys, comments and blank lines") {
    const ExperimentConfig c = parse_config(R"(
# comment line
scenario = estimate
X = 60     # trailing comment
K = 16
M = 20
grid_J = 50
noise_mode = target_snr
snr_db = 9.5
mu = 150
runs = 3
sweep_values = 1, 2 ,3
sweep_traces = true
)");
    CHECK(c.scenario == Scenario::estimate);
    CHECK(c.domain.X == 60.0);
    CHECK(c.K == 16);
    CHECK(c.domain.K == 16);
    CHECK(c.M == 20);
    CHECK(c.noise.mode == NoiseMode::target_snr);
    CHECK(c.noise.snr_db == 9.5);
    CHECK(c.mu == 150.0);
    CHECK(c.runs == 3);
    CHECK(c.sweep.values == std::vector<double>{1, 2, 3});
    CHECK(c.sweep_traces);
    CHECK_NOTHROW(c.validate());
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_WITH_AS(parse_config("alpah = 1\n"), doctest::Contains("unknown key"), ConfigError);
  }
  SUBCASE("malformed line") {
    CHECK_THROWS_AS(parse_config("K 32\n"), ConfigError);
  }
  SUBCASE("bad number") {
    CHECK_THROWS_AS(parse_config("h = 0.0x5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("K = 3.5\n"), ConfigError);
  }
  SUBCASE("bad enum") {
    CHECK_THROWS_AS(parse_config("scenario = fly\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("noise_mode = loud\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sweep_axis = h\n"), ConfigError);
  }
  SUBCASE("empty value") {
    CHECK_THROWS_AS(parse_config("K =\n"), ConfigError);
  }
  SUBCASE("scenario names round-trip") {
    for (Scenario s : {Scenario::simulate, Scenario::sync, Scenario::estimate, Scenario::sweep,
                       Scenario::ubkf_compare, Scenario::control})
      CHECK(parse_scenario(scenario_name(s)) == s);
    for (SweepAxis a : {SweepAxis::K, SweepAxis::D, SweepAxis::mu, SweepAxis::snr})
      CHECK(parse_sweep_axis(sweep_axis_name(a)) == a);
  }
}

TEST_CASE("validate") {
  SUBCASE("grid too coarse for the master order") {
    ExperimentConfig c;
    c.M = 64;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("grid_J"), ConfigError);
    c.grid_J = 129;
    CHECK_NOTHROW(c.validate());
  }
  SUBCASE("simulate ignores the grid rule") {
    ExperimentConfig c;
    c.scenario = Scenario::simulate;
    c.grid_J = 10;
    CHECK_NOTHROW(c.validate());
  }
  SUBCASE("K sweep values count toward the grid rule") {
    ExperimentConfig c = parse_config("scenario = sweep\nsweep_axis = K\nsweep_values = 16, 32, 66\n");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.grid_J = 133;
    CHECK_NOTHROW(c.validate());
  }
  SUBCASE("sweep values must be monotone and non-empty") {
    ExperimentConfig c = parse_config("scenario = sweep\nsweep_axis = D\nsweep_values = 1, 3, 2\n");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sweep.values.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("nested sweep is rejected") {
    ExperimentConfig c = parse_config("scenario = sweep\nsweep_scenario = sweep\nsweep_values = 1\n");
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("filter comparison needs K == M") {
    ExperimentConfig c;
    c.scenario = Scenario::ubkf_compare;
    c.M = 40;
    c.grid_J = 81;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("domain errors become ConfigError") {
    ExperimentConfig c;
    c.domain.h = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.runs = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.mu = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}

TEST_CASE("load_config reports missing files") {
  CHECK_THROWS_AS(load_config("/nonexistent/kssync.conf"), std::ios_base::failure);
}
