#pragma once

// Scenario pipelines: burn-in -> master simulation -> observation ->
// slave (or cubature filter) -> metrics, plus CSV output and parallel sweeps.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kssync/config.hpp"
#include "kssync/master.hpp"
#include "kssync/metrics.hpp"
#include "kssync/slave.hpp"

namespace kssync {

/// Raised for output-file failures (exit code 4 in the CLI).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One row of field.csv.
struct FieldSample {
  double t, x, u, v;
};

struct RunResult {
  int run_id = 0;
  RunTrace trace;
  ModelParams final_theta{};
  bool ok = true;
  std::string error;
  long fail_step = -1;
  std::vector<FieldSample> field;
};

struct SummaryRow {
  double axis_value = 0.0;
  int run_id = 0;
  double tail_e2_mean = 0.0;
  double tail_e2_std = 0.0;
  ParamError final_err2{};
  std::string status = "ok";
};

/// Fraction of the time span used for tail averages (the final fifth).
inline constexpr double kTailFraction = 0.2;

/// Smoothstep ramp target * s(t / ramp_T), s(r) = 3r^2 - 2r^3 clamped to [0, 1].
/// Independent of x.
double control_reference(double t, double x, double target, double ramp_T);

/// Burn-in followed by a stride-1 master simulation at order M.
MasterTrajectory prepare_master(const ExperimentConfig& cfg);

/// Time-averaged mean field power of a trajectory.
double trajectory_power(const MasterTrajectory& traj);

/// Observation-driven slave run against a precomputed master trajectory.
/// With theta0 = theta_true and mu = 0 this is the fixed-parameter slave.
/// Divergence is reported through RunResult, not thrown.
RunResult run_slave(const ExperimentConfig& cfg, const MasterTrajectory& master, const ModelParams& theta0,
                    double mu, int run_id);

/// Cubature filter run on the same observation model as run_slave.
RunResult run_filter(const ExperimentConfig& cfg, const MasterTrajectory& master, int run_id);

/// Slave driven by the smoothstep control reference instead of a master.
RunResult run_control(const ExperimentConfig& cfg, int run_id);

/// Tail mean/spread over replicates; failed replicates mark the status.
SummaryRow summarize(const std::vector<RunResult>& runs, double axis_value, int row_id);

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);
void write_field_csv(const std::filesystem::path& path, const std::vector<FieldSample>& field);

/// Runs fn(0) ... fn(n-1) on up to `jobs` worker threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

/// Executes the configured scenario and returns the files written.
/// Throws ConfigError, DivergenceError (first failing run) or IoError.
std::vector<std::filesystem::path> run_scenario(const ExperimentConfig& cfg, int jobs = 1);

/// One summary row per sweep value, replicates in parallel; returns summary.csv.
std::filesystem::path run_sweep(const ExperimentConfig& cfg, const SweepSpec& spec, int jobs = 1);

/// Replicate results for one sweep cell (exposed for the acceptance suite).
std::vector<RunResult> run_cell(const ExperimentConfig& cell, const MasterTrajectory* shared_master, int jobs);

/// Applies one sweep value to a copy of cfg.
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepAxis axis, double value);

}  // namespace kssync
