#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kssync/observation.hpp"
#include "kssync/spectral.hpp"
#include "kssync/ubkf.hpp"

namespace kssync {

/// Invalid experiment configuration; the message names the violated rule.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { simulate, sync, estimate, sweep, ubkf_compare, control };

enum class SweepAxis { K, D, mu, snr };

struct SweepSpec {
  SweepAxis axis = SweepAxis::K;
  std::vector<double> values;

  void validate() const;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::sync;
  /// domain.K is the slave order; the master runs at order M.
  DomainConfig domain{};
  ModelParams theta_true{1.15, -0.05, 0.98};
  ModelParams theta0{0.0, 0.0, 0.0};
  int M = 32;
  int K = 32;
  int grid_J = 120;
  double coupling_d = 1.0;
  double mu = 200.0;
  NoiseConfig noise{};
  int runs = 1;
  double burn_T = 100.0;
  long store_stride = 10;
  long decimate_obs = 1;
  long field_stride = 0;
  std::string output_dir = "out";
  std::uint64_t base_seed = 1;

  Scenario sweep_scenario = Scenario::estimate;
  SweepSpec sweep{};
  bool sweep_traces = false;

  UbkfOptions ubkf{};

  double control_target = 3.0;
  double control_ramp_T = 20.0;

  /// Master-order domain (K replaced by M).
  DomainConfig master_domain() const {
    DomainConfig d = domain;
    d.K = M;
    return d;
  }

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view sweep_axis_name(SweepAxis a);

/// Parses flat `key = value` text with `#` comments. Unknown keys,
/// malformed lines and unparsable values raise ConfigError.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

/// Reads and parses a config file; I/O failures raise std::ios_base::failure.
ExperimentConfig load_config(const std::string& path);

}  // namespace kssync
