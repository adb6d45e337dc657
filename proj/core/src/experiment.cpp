#include "kssync/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "kssync/observation.hpp"
#include "kssync/ubkf.hpp"

namespace kssync {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void put(std::string& out, double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ec == std::errc() ? p : buf);
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string run_dir(int run_id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "run_%03d", run_id);
  return buf;
}

std::uint64_t run_seed(const ExperimentConfig& cfg, int run_id) {
  return cfg.base_seed + static_cast<std::uint64_t>(run_id);
}

void record_point(RunTrace& trace, double t, const SpectralCoefficients& truth, const SlaveState& s,
                  const ModelParams& theta_true) {
  const SpectralCoefficients e = error_coeffs(truth, s.b);
  const double p = truth.power();
  const double e2 = p > 0.0 ? e.power() / p : kNaN;
  trace.push(t, e2, cost_C(e), s.theta_hat, param_sq_err_mixed(s.theta_hat, theta_true));
}

void append_field(std::vector<FieldSample>& out, double t, const std::vector<double>& grid,
                  const RealVector& u, const RealVector& v) {
  for (std::size_t j = 0; j < grid.size(); ++j)
    out.push_back({t, grid[j], u[static_cast<Eigen::Index>(j)], v[static_cast<Eigen::Index>(j)]});
}

}  // namespace

double control_reference(double t, double /*x*/, double target, double ramp_T) {
  if (!(ramp_T > 0.0)) throw std::invalid_argument("ramp_T must be positive");
  const double r = std::clamp(t / ramp_T, 0.0, 1.0);
  return target * r * r * (3.0 - 2.0 * r);
}

MasterTrajectory prepare_master(const ExperimentConfig& cfg) {
  const DomainConfig md = cfg.master_domain();
  const SpectralCoefficients c0 = burn_in_init(cfg.theta_true, md, cfg.burn_T);
  return simulate_master(c0, cfg.theta_true, md, 1);
}

double trajectory_power(const MasterTrajectory& traj) {
  if (traj.coeffs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& c : traj.coeffs) acc += c.power();
  return acc / static_cast<double>(traj.coeffs.size());
}

RunResult run_slave(const ExperimentConfig& cfg, const MasterTrajectory& master, const ModelParams& theta0,
                    double mu, int run_id) {
  const DomainConfig& d = cfg.domain;
  const long N = d.steps();
  if (master.store_stride != 1 || static_cast<long>(master.coeffs.size()) != N + 1)
    throw std::invalid_argument("run_slave: master trajectory must hold every step of the run");
  check_euler_stability(cfg.theta_true, d, cfg.coupling_d);

  const std::vector<double> grid = uniform_grid(static_cast<std::size_t>(cfg.grid_J), d.X);
  const ObservationSetup setup(grid, cfg.K, d.X);
  const SynthesisTable master_table(grid, d.X, master.coeffs.front().order());
  std::optional<SynthesisTable> slave_table;
  if (cfg.field_stride > 0) slave_table.emplace(grid, d.X, cfg.K);

  const double sigma = cfg.noise.resolve_sigma(trajectory_power(master));
  NoiseEngine rng(run_seed(cfg, run_id));
  const double w0 = d.omega0();

  RunResult res;
  res.run_id = run_id;
  res.trace.reserve(static_cast<std::size_t>(N / cfg.store_stride + 2));
  SlaveState state = SlaveState::initial(seed_state(cfg.K), theta0, CouplingMatrix::scalar(cfg.coupling_d), mu);
  SpectralCoefficients a_hat(cfg.K);

  long n = 0;
  try {
    for (; n < N; ++n) {
      const SpectralCoefficients& truth = master.coeffs[static_cast<std::size_t>(n)];
      if (n % cfg.decimate_obs == 0) a_hat = ls_fit(setup, observe(truth, master_table, sigma, rng));
      if (n % cfg.store_stride == 0) record_point(res.trace, n * d.h, truth, state, cfg.theta_true);
      if (slave_table && n % cfg.field_stride == 0)
        append_field(res.field, n * d.h, grid, master_table.synthesize(truth), slave_table->synthesize(state.b));
      adaptive_step_inplace(state, a_hat, d.h, w0);
    }
    record_point(res.trace, N * d.h, master.coeffs.back(), state, cfg.theta_true);
  } catch (const DivergenceError&) {
    res.ok = false;
    res.fail_step = n + 1;
    res.error = "run " + std::to_string(run_id) + " diverged at step " + std::to_string(n + 1);
  }
  res.final_theta = state.theta_hat;
  return res;
}

RunResult run_filter(const ExperimentConfig& cfg, const MasterTrajectory& master, int run_id) {
  const DomainConfig& d = cfg.domain;
  const long N = d.steps();
  if (master.store_stride != 1 || static_cast<long>(master.coeffs.size()) != N + 1)
    throw std::invalid_argument("run_filter: master trajectory must hold every step of the run");
  const std::vector<double> grid = uniform_grid(static_cast<std::size_t>(cfg.grid_J), d.X);
  const ObservationSetup setup(grid, cfg.K, d.X);
  const SynthesisTable table(grid, d.X, master.coeffs.front().order());
  const double sigma = cfg.noise.resolve_sigma(trajectory_power(master));
  NoiseEngine rng(run_seed(cfg, run_id));

  // A zero measurement variance makes the innovation covariance singular when J > n.
  const FilterState init = make_filter_state(seed_state(cfg.K), std::max(sigma * sigma, 1e-10), cfg.ubkf);
  const ObservationStream obs = [&](long i) -> std::optional<RealVector> {
    if (i > N) return std::nullopt;
    return observe(master.coeffs[static_cast<std::size_t>(i)], table, sigma, rng);
  };
  const TruthSource truth = [&](long i) { return master.coeffs[static_cast<std::size_t>(i)].resized(cfg.K); };

  RunResult res;
  res.run_id = run_id;
  try {
    UbkfResult r = run_ubkf(init, obs, setup, d, truth, cfg.theta_true, cfg.store_stride);
    res.trace = std::move(r.trace);
    res.final_theta = decode_params(r.final_state.mean);
  } catch (const DivergenceError& e) {
    res.ok = false;
    res.fail_step = e.step();
    res.error = "run " + std::to_string(run_id) + " (ubkf) diverged at step " + std::to_string(e.step());
  } catch (const std::runtime_error& e) {
    res.ok = false;
    res.error = "run " + std::to_string(run_id) + " (ubkf): " + e.what();
  }
  return res;
}

RunResult run_control(const ExperimentConfig& cfg, int run_id) {
  const DomainConfig& d = cfg.domain;
  const long N = d.steps();
  const std::vector<double> grid = uniform_grid(static_cast<std::size_t>(cfg.grid_J), d.X);
  const ObservationSetup setup(grid, cfg.K, d.X);
  std::optional<SynthesisTable> slave_table;
  if (cfg.field_stride > 0) slave_table.emplace(grid, d.X, cfg.K);

  auto ref_at = [&](long n) { return control_reference(n * d.h, 0.0, cfg.control_target, cfg.control_ramp_T); };
  double power = 0.0;
  for (long n = 0; n <= N; ++n) power += ref_at(n) * ref_at(n);
  power /= static_cast<double>(N + 1);
  const double sigma = cfg.noise.mode == NoiseMode::off ? 0.0 : cfg.noise.resolve_sigma(power);
  NoiseEngine rng(run_seed(cfg, run_id));
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);

  RunResult res;
  res.run_id = run_id;
  SlaveState state =
      SlaveState::initial(seed_state(cfg.K), cfg.theta0, CouplingMatrix::scalar(cfg.coupling_d), cfg.mu);
  SpectralCoefficients a_hat(cfg.K);
  const double w0 = d.omega0();
  RealVector u(static_cast<Eigen::Index>(grid.size()));

  long n = 0;
  try {
    for (; n < N; ++n) {
      const double r = ref_at(n);
      SpectralCoefficients truth(cfg.K);
      truth.set(0, r);
      if (n % cfg.decimate_obs == 0) {
        for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = r + (sigma > 0.0 ? noise(rng) : 0.0);
        a_hat = ls_fit(setup, u);
      }
      if (n % cfg.store_stride == 0) record_point(res.trace, n * d.h, truth, state, cfg.theta_true);
      if (slave_table && n % cfg.field_stride == 0)
        append_field(res.field, n * d.h, grid, RealVector::Constant(u.size(), r), slave_table->synthesize(state.b));
      adaptive_step_inplace(state, a_hat, d.h, w0);
    }
    SpectralCoefficients truth(cfg.K);
    truth.set(0, ref_at(N));
    record_point(res.trace, N * d.h, truth, state, cfg.theta_true);
    if (slave_table)
      append_field(res.field, N * d.h, grid, RealVector::Constant(u.size(), ref_at(N)),
                   slave_table->synthesize(state.b));
  } catch (const DivergenceError&) {
    res.ok = false;
    res.fail_step = n + 1;
    res.error = "run " + std::to_string(run_id) + " diverged at step " + std::to_string(n + 1);
  }
  res.final_theta = state.theta_hat;
  return res;
}

SummaryRow summarize(const std::vector<RunResult>& runs, double axis_value, int row_id) {
  SummaryRow row;
  row.axis_value = axis_value;
  row.run_id = row_id;
  std::vector<double> tails;
  ParamError err{};
  int failed = 0;
  for (const auto& r : runs) {
    if (!r.ok || r.trace.size() == 0) {
      ++failed;
      continue;
    }
    tails.push_back(tail_average(r.trace.normalized_mse, r.trace.times, kTailFraction));
    for (int i = 0; i < 3; ++i) err[i] += r.trace.param_sq_err.back()[i];
  }
  if (tails.empty()) {
    row.tail_e2_mean = row.tail_e2_std = kNaN;
    row.final_err2 = {kNaN, kNaN, kNaN};
    row.status = "failed";
    return row;
  }
  const double n = static_cast<double>(tails.size());
  double mean = 0.0;
  for (double v : tails) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : tails) var += (v - mean) * (v - mean);
  row.tail_e2_mean = mean;
  row.tail_e2_std = tails.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  for (int i = 0; i < 3; ++i) row.final_err2[i] = err[i] / n;
  row.status = failed == 0 ? "ok" : "partial:" + std::to_string(failed) + "_failed";
  return row;
}

void write_trace_csv(const fs::path& path, const RunTrace& trace) {
  std::string out = "t,e2_norm,cost,alpha_hat,beta_hat,gamma_hat,err2_alpha,err2_beta,err2_gamma\n";
  out.reserve(trace.size() * 200);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    put(out, trace.times[i]);
    for (double v : {trace.normalized_mse[i], trace.cost[i], trace.theta_hat[i].alpha, trace.theta_hat[i].beta,
                     trace.theta_hat[i].gamma, trace.param_sq_err[i][0], trace.param_sq_err[i][1],
                     trace.param_sq_err[i][2]}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  std::string out =
      "axis_value,run_id,tail_e2_mean,tail_e2_std,final_err2_alpha,final_err2_beta,final_err2_gamma,status\n";
  for (const auto& r : rows) {
    put(out, r.axis_value);
    out += ',' + std::to_string(r.run_id);
    for (double v : {r.tail_e2_mean, r.tail_e2_std, r.final_err2[0], r.final_err2[1], r.final_err2[2]}) {
      out += ',';
      put(out, v);
    }
    out += ',' + r.status + '\n';
  }
  write_file(path, out);
}

void write_field_csv(const fs::path& path, const std::vector<FieldSample>& field) {
  std::string out = "t,x,u,v,err\n";
  out.reserve(field.size() * 80);
  for (const auto& f : field) {
    put(out, f.t);
    for (double v : {f.x, f.u, f.v, f.u - f.v}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  write_file(path, out);
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::clamp(jobs, 1, std::max(n, 1));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex m;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig c = cfg;
  c.scenario = cfg.sweep_scenario;
  switch (axis) {
    case SweepAxis::K:
      c.K = c.domain.K = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::D:
      c.coupling_d = value;
      break;
    case SweepAxis::mu:
      c.mu = value;
      break;
    case SweepAxis::snr:
      c.noise.mode = NoiseMode::target_snr;
      c.noise.snr_db = value;
      break;
  }
  return c;
}

namespace {

RunResult run_replicate(const ExperimentConfig& cell, const MasterTrajectory* master, int r) {
  switch (cell.scenario) {
    case Scenario::sync:
      return run_slave(cell, *master, cell.theta_true, 0.0, r);
    case Scenario::estimate:
      return run_slave(cell, *master, cell.theta0, cell.mu, r);
    case Scenario::control:
      return run_control(cell, r);
    default:
      throw ConfigError("scenario cannot be replicated: " + std::string(scenario_name(cell.scenario)));
  }
}

void write_runs(const fs::path& dir, const std::vector<RunResult>& results) {
  for (const auto& r : results) {
    if (r.trace.size() > 0) write_trace_csv(dir / run_dir(r.run_id) / "trace.csv", r.trace);
    if (!r.field.empty()) write_field_csv(dir / run_dir(r.run_id) / "field.csv", r.field);
  }
}

void throw_first_failure(const std::vector<RunResult>& results) {
  for (const auto& r : results)
    if (!r.ok) throw DivergenceError(r.error.empty() ? "run " + std::to_string(r.run_id) : r.error, r.fail_step);
}

}  // namespace

std::vector<RunResult> run_cell(const ExperimentConfig& cell, const MasterTrajectory* shared_master, int jobs) {
  std::optional<MasterTrajectory> own;
  if (cell.scenario != Scenario::control && shared_master == nullptr) {
    own = prepare_master(cell);
    shared_master = &*own;
  }
  std::vector<RunResult> results(static_cast<std::size_t>(cell.runs));
  parallel_for(cell.runs, jobs, [&](int r) { results[static_cast<std::size_t>(r)] = run_replicate(cell, shared_master, r); });
  return results;
}

fs::path run_sweep(const ExperimentConfig& cfg, const SweepSpec& spec, int jobs) {
  spec.validate();
  const fs::path out = cfg.output_dir;
  std::optional<MasterTrajectory> master;
  if (cfg.sweep_scenario != Scenario::control) master = prepare_master(cfg);

  const int cells = static_cast<int>(spec.values.size());
  std::vector<ExperimentConfig> cell_cfg;
  for (double v : spec.values) {
    cell_cfg.push_back(apply_sweep_value(cfg, spec.axis, v));
    cell_cfg.back().validate();
  }
  std::vector<std::vector<RunResult>> results(static_cast<std::size_t>(cells),
                                              std::vector<RunResult>(static_cast<std::size_t>(cfg.runs)));
  const MasterTrajectory* mp = master ? &*master : nullptr;
  parallel_for(cells * cfg.runs, jobs, [&](int task) {
    const int c = task / cfg.runs;
    const int r = task % cfg.runs;
    try {
      results[c][r] = run_replicate(cell_cfg[c], mp, r);
    } catch (const std::invalid_argument& e) {
      RunResult bad;
      bad.run_id = r;
      bad.ok = false;
      bad.error = e.what();
      results[c][r] = std::move(bad);
    }
  });

  std::vector<SummaryRow> rows;
  for (int c = 0; c < cells; ++c) {
    rows.push_back(summarize(results[c], spec.values[c], c));
    if (cfg.sweep_traces) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "cell_%03d", c);
      write_runs(out / buf, results[c]);
    }
  }
  const fs::path summary = out / "summary.csv";
  write_summary_csv(summary, rows);
  return summary;
}

std::vector<fs::path> run_scenario(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  std::vector<fs::path> written;

  switch (cfg.scenario) {
    case Scenario::simulate: {
      const MasterTrajectory master = prepare_master(cfg);
      std::string csv = "t,power\n";
      std::vector<FieldSample> field;
      const std::vector<double> grid = uniform_grid(static_cast<std::size_t>(cfg.grid_J), cfg.domain.X);
      const SynthesisTable table(grid, cfg.domain.X, cfg.M);
      const RealVector zero = RealVector::Zero(static_cast<Eigen::Index>(grid.size()));
      const long last = static_cast<long>(master.coeffs.size()) - 1;
      for (long n = 0; n <= last; ++n) {
        if (n % cfg.store_stride == 0 || n == last) {
          put(csv, master.times[n]);
          csv += ',';
          put(csv, master.coeffs[n].power());
          csv += '\n';
        }
        if (cfg.field_stride > 0 && n % cfg.field_stride == 0)
          append_field(field, master.times[n], grid, table.synthesize(master.coeffs[n]), zero);
      }
      write_file(out / "master.csv", csv);
      written.push_back(out / "master.csv");
      if (!field.empty()) {
        write_field_csv(out / "field.csv", field);
        written.push_back(out / "field.csv");
      }
      return written;
    }
    case Scenario::sync:
    case Scenario::estimate:
    case Scenario::control: {
      const std::vector<RunResult> results = run_cell(cfg, nullptr, jobs);
      write_runs(out, results);
      for (const auto& r : results) {
        if (r.trace.size() > 0) written.push_back(out / run_dir(r.run_id) / "trace.csv");
        if (!r.field.empty()) written.push_back(out / run_dir(r.run_id) / "field.csv");
      }
      write_summary_csv(out / "summary.csv", {summarize(results, kNaN, 0)});
      written.push_back(out / "summary.csv");
      throw_first_failure(results);
      return written;
    }
    case Scenario::ubkf_compare: {
      const MasterTrajectory master = prepare_master(cfg);
      std::vector<RunResult> sync(static_cast<std::size_t>(cfg.runs)), filt(static_cast<std::size_t>(cfg.runs));
      parallel_for(2 * cfg.runs, jobs, [&](int task) {
        const int r = task / 2;
        if (task % 2 == 0)
          sync[r] = run_slave(cfg, master, cfg.theta0, cfg.mu, r);
        else
          filt[r] = run_filter(cfg, master, r);
      });
      write_runs(out / "sync", sync);
      write_runs(out / "ubkf", filt);
      write_summary_csv(out / "sync" / "summary.csv", {summarize(sync, kNaN, 0)});
      write_summary_csv(out / "ubkf" / "summary.csv", {summarize(filt, kNaN, 0)});
      for (int r = 0; r < cfg.runs; ++r) {
        written.push_back(out / "sync" / run_dir(r) / "trace.csv");
        written.push_back(out / "ubkf" / run_dir(r) / "trace.csv");
      }
      written.push_back(out / "sync" / "summary.csv");
      written.push_back(out / "ubkf" / "summary.csv");
      throw_first_failure(sync);
      throw_first_failure(filt);
      return written;
    }
    case Scenario::sweep:
      written.push_back(run_sweep(cfg, cfg.sweep, jobs));
      return written;
  }
  return written;
}

}  // namespace kssync
