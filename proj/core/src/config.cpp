#include "kssync/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace kssync {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("invalid number for '" + std::string(key) + "': " + std::string(v));
  return out;
}

long to_long(std::string_view key, std::string_view v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("invalid integer for '" + std::string(key) + "': " + std::string(v));
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("invalid unsigned for '" + std::string(key) + "': " + std::string(v));
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': " + std::string(v));
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (item.empty()) throw ConfigError("empty list item in '" + std::string(key) + "'");
    out.push_back(to_double(key, item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

NoiseMode parse_noise_mode(std::string_view v) {
  if (v == "off") return NoiseMode::off;
  if (v == "fixed_sigma") return NoiseMode::fixed_sigma;
  if (v == "target_snr") return NoiseMode::target_snr;
  throw ConfigError("unknown noise_mode: " + std::string(v));
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"scenario", [](auto& c, auto, auto v) { c.scenario = parse_scenario(v); }},
      {"X", [](auto& c, auto k, auto v) { c.domain.X = to_double(k, v); }},
      {"h", [](auto& c, auto k, auto v) { c.domain.h = to_double(k, v); }},
      {"T", [](auto& c, auto k, auto v) { c.domain.T = to_double(k, v); }},
      {"M", [](auto& c, auto k, auto v) { c.M = static_cast<int>(to_long(k, v)); }},
      {"K", [](auto& c, auto k, auto v) { c.K = c.domain.K = static_cast<int>(to_long(k, v)); }},
      {"grid_J", [](auto& c, auto k, auto v) { c.grid_J = static_cast<int>(to_long(k, v)); }},
      {"alpha", [](auto& c, auto k, auto v) { c.theta_true.alpha = to_double(k, v); }},
      {"beta", [](auto& c, auto k, auto v) { c.theta_true.beta = to_double(k, v); }},
      {"gamma", [](auto& c, auto k, auto v) { c.theta_true.gamma = to_double(k, v); }},
      {"theta0_alpha", [](auto& c, auto k, auto v) { c.theta0.alpha = to_double(k, v); }},
      {"theta0_beta", [](auto& c, auto k, auto v) { c.theta0.beta = to_double(k, v); }},
      {"theta0_gamma", [](auto& c, auto k, auto v) { c.theta0.gamma = to_double(k, v); }},
      {"coupling_d", [](auto& c, auto k, auto v) { c.coupling_d = to_double(k, v); }},
      {"mu", [](auto& c, auto k, auto v) { c.mu = to_double(k, v); }},
      {"noise_mode", [](auto& c, auto, auto v) { c.noise.mode = parse_noise_mode(v); }},
      {"noise_sigma", [](auto& c, auto k, auto v) { c.noise.sigma = to_double(k, v); }},
      {"snr_db", [](auto& c, auto k, auto v) { c.noise.snr_db = to_double(k, v); }},
      {"runs", [](auto& c, auto k, auto v) { c.runs = static_cast<int>(to_long(k, v)); }},
      {"burn_T", [](auto& c, auto k, auto v) { c.burn_T = to_double(k, v); }},
      {"store_stride", [](auto& c, auto k, auto v) { c.store_stride = to_long(k, v); }},
      {"decimate_obs", [](auto& c, auto k, auto v) { c.decimate_obs = to_long(k, v); }},
      {"field_stride", [](auto& c, auto k, auto v) { c.field_stride = to_long(k, v); }},
      {"output_dir", [](auto& c, auto, auto v) { c.output_dir = std::string(v); }},
      {"base_seed", [](auto& c, auto k, auto v) { c.base_seed = to_u64(k, v); }},
      {"sweep_scenario", [](auto& c, auto, auto v) { c.sweep_scenario = parse_scenario(v); }},
      {"sweep_axis", [](auto& c, auto, auto v) { c.sweep.axis = parse_sweep_axis(v); }},
      {"sweep_values", [](auto& c, auto k, auto v) { c.sweep.values = to_list(k, v); }},
      {"sweep_traces", [](auto& c, auto k, auto v) { c.sweep_traces = to_bool(k, v); }},
      {"ubkf_coeff_q", [](auto& c, auto k, auto v) { c.ubkf.coeff_process_noise = to_double(k, v); }},
      {"ubkf_theta_q", [](auto& c, auto k, auto v) { c.ubkf.theta_process_noise = to_double(k, v); }},
      {"ubkf_prior_var", [](auto& c, auto k, auto v) { c.ubkf.prior_var = to_double(k, v); }},
      {"ubkf_theta0_alpha", [](auto& c, auto k, auto v) { c.ubkf.theta_prior.alpha = to_double(k, v); }},
      {"ubkf_theta0_beta", [](auto& c, auto k, auto v) { c.ubkf.theta_prior.beta = to_double(k, v); }},
      {"ubkf_theta0_gamma", [](auto& c, auto k, auto v) { c.ubkf.theta_prior.gamma = to_double(k, v); }},
      {"control_target", [](auto& c, auto k, auto v) { c.control_target = to_double(k, v); }},
      {"control_ramp_T", [](auto& c, auto k, auto v) { c.control_ramp_T = to_double(k, v); }},
  };
  return table;
}

}  // namespace

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep_values must be non-empty");
  const bool inc = std::adjacent_find(values.begin(), values.end(), std::greater_equal<>()) == values.end();
  const bool dec = std::adjacent_find(values.begin(), values.end(), std::less_equal<>()) == values.end();
  if (!inc && !dec) throw ConfigError("sweep_values must be strictly monotone");
}

Scenario parse_scenario(std::string_view name) {
  if (name == "simulate") return Scenario::simulate;
  if (name == "sync") return Scenario::sync;
  if (name == "estimate") return Scenario::estimate;
  if (name == "sweep") return Scenario::sweep;
  if (name == "ubkf-compare" || name == "ubkf_compare") return Scenario::ubkf_compare;
  if (name == "control") return Scenario::control;
  throw ConfigError("unknown scenario: " + std::string(name));
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::simulate: return "simulate";
    case Scenario::sync: return "sync";
    case Scenario::estimate: return "estimate";
    case Scenario::sweep: return "sweep";
    case Scenario::ubkf_compare: return "ubkf-compare";
    case Scenario::control: return "control";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "K") return SweepAxis::K;
  if (name == "D") return SweepAxis::D;
  if (name == "mu") return SweepAxis::mu;
  if (name == "snr") return SweepAxis::snr;
  throw ConfigError("unknown sweep_axis: " + std::string(name));
}

std::string_view sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::K: return "K";
    case SweepAxis::D: return "D";
    case SweepAxis::mu: return "mu";
    case SweepAxis::snr: return "snr";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  try {
    domain.validate();
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (domain.K != K) throw ConfigError("domain.K must equal K");
  if (M < 1) throw ConfigError("M must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (!(burn_T >= 0.0)) throw ConfigError("burn_T must be >= 0");
  if (store_stride < 1) throw ConfigError("store_stride must be >= 1");
  if (decimate_obs < 1) throw ConfigError("decimate_obs must be >= 1");
  if (field_stride < 0) throw ConfigError("field_stride must be >= 0");
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!std::isfinite(coupling_d)) throw ConfigError("coupling_d must be finite");
  if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
  if (!(control_ramp_T > 0.0)) throw ConfigError("control_ramp_T must be positive");

  const Scenario fit = scenario == Scenario::sweep ? sweep_scenario : scenario;
  if (scenario == Scenario::sweep) {
    if (sweep_scenario != Scenario::sync && sweep_scenario != Scenario::estimate &&
        sweep_scenario != Scenario::control)
      throw ConfigError("sweep_scenario must be sync, estimate or control");
    sweep.validate();
  }
  if (fit != Scenario::simulate) {
    int order = std::max(M, K);
    if (scenario == Scenario::sweep && sweep.axis == SweepAxis::K)
      for (double v : sweep.values) order = std::max(order, static_cast<int>(v));
    if (grid_J < 2 * order + 1)
      throw ConfigError("grid_J >= 2*max(M,K)+1 violated (grid_J=" + std::to_string(grid_J) +
                        ", max order=" + std::to_string(order) + ")");
  }
  if (fit == Scenario::ubkf_compare && K != M) throw ConfigError("ubkf-compare requires K == M");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  const auto& table = setters();
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + std::string(key) + "'");
    it->second(base, key, value);
  }
  return base;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace kssync
