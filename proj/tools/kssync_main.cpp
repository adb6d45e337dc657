// kssync <scenario> --config <file> [--seed N] [--out DIR] [--jobs N]
//
// Exit codes: 0 success, 2 config error, 3 divergence, 4 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kssync/config.hpp"
#include "kssync/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronization-based simulation and parameter estimation for the generalized KS equation"};
  std::string scenario;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int jobs = 1;
  bool quiet = false;

  app.add_option("scenario", scenario, "simulate|sync|estimate|sweep|ubkf-compare|control")->required();
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--seed", seed, "base seed (overrides base_seed)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "do not list written files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  kssync::ExperimentConfig cfg;
  try {
    cfg = kssync::load_config(config_path);
    cfg.scenario = kssync::parse_scenario(scenario);
    if (seed) cfg.base_seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    cfg.validate();
  } catch (const kssync::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    for (const auto& p : kssync::run_scenario(cfg, jobs))
      if (!quiet) std::cout << p.string() << '\n';
  } catch (const kssync::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kssync::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const kssync::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
