#include <random>

#include <benchmark/benchmark.h>

#include "kssync/master.hpp"
#include "kssync/observation.hpp"
#include "kssync/slave.hpp"
#include "kssync/ubkf.hpp"

using namespace kssync;

namespace {

const ModelParams kTheta{1.15, -0.05, 0.98};

SpectralCoefficients random_state(int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ComplexVector c(K + 1);
  c[0] = 0.0;
  for (int k = 1; k <= K; ++k) c[k] = Complex(n(rng), n(rng)) / (1.0 + k);
  return SpectralCoefficients(c);
}

void BM_NonlinearTerm(benchmark::State& st) {
  const SpectralCoefficients c = random_state(static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(nonlinear_term(c));
}
BENCHMARK(BM_NonlinearTerm)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_MasterStep(benchmark::State& st) {
  const int K = static_cast<int>(st.range(0));
  SpectralCoefficients c = random_state(K, 2);
  const double w0 = 2 * 3.141592653589793 / 120.0;
  for (auto _ : st) {
    c.axpy(0.005, master_rhs(c, kTheta, w0));
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_MasterStep)->Arg(32)->Arg(64);

void BM_LsFit(benchmark::State& st) {
  const int K = static_cast<int>(st.range(0));
  const ObservationSetup setup = build_setup(uniform_grid(static_cast<std::size_t>(4 * K), 120.0), K, 120.0);
  const SynthesisTable table(setup.grid(), 120.0, K);
  const RealVector u = table.synthesize(random_state(K, 3));
  for (auto _ : st) benchmark::DoNotOptimize(ls_fit(setup, u));
}
BENCHMARK(BM_LsFit)->Arg(32)->Arg(64);

void BM_AdaptiveStep(benchmark::State& st) {
  const int K = static_cast<int>(st.range(0));
  const SpectralCoefficients a = random_state(K, 4);
  SlaveState s = SlaveState::initial(random_state(K, 5), kTheta, CouplingMatrix::scalar(1.0), 200.0);
  const double w0 = 2 * 3.141592653589793 / 120.0;
  for (auto _ : st) {
    adaptive_step_inplace(s, a, 0.005, w0);
    s.b = a;
  }
}
BENCHMARK(BM_AdaptiveStep)->Arg(32)->Arg(64);

void BM_UbkfStep(benchmark::State& st) {
  const int K = static_cast<int>(st.range(0));
  DomainConfig cfg;
  cfg.X = 30.0;
  cfg.K = K;
  const ObservationSetup setup = build_setup(uniform_grid(static_cast<std::size_t>(4 * K), cfg.X), K, cfg.X);
  const CubatureFilter filter(setup, cfg, K);
  const SpectralCoefficients a = random_state(K, 6);
  const RealVector u = SynthesisTable(setup.grid(), cfg.X, K).synthesize(a);
  const FilterState init = make_filter_state(a, 0.1);
  for (auto _ : st) {
    FilterState s = init;
    filter.step(s, u);
    benchmark::DoNotOptimize(s.mean);
  }
}
BENCHMARK(BM_UbkfStep)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
