#include <benchmark/benchmark.h>

#include "consflow/harness.hpp"
#include "consflow/instances.hpp"
#include "consflow/spectral.hpp"

using namespace consflow;

namespace {

void BM_RhsPlain(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const LinearSystem sys = to_system(random_square_instance(n, 5));
  const NetworkGraph g = generate(Topology::random_connected, n, 6);
  const FlowOperators ops(sys, g);
  FlowConfig config;
  const AgentState s = initialize(sys, g, config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs_plain(s, g, ops));
  }
}
BENCHMARK(BM_RhsPlain)->Arg(8)->Arg(20)->Arg(50);

void BM_RunToConvergence(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const LinearSystem sys = to_system(random_square_instance(n, 7));
  const NetworkGraph g = generate(Topology::random_connected, n, 8);
  FlowConfig config;
  config.convergence_tol = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(sys, g, config));
  }
}
BENCHMARK(BM_RunToConvergence)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SpectralReport(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const LinearSystem sys = to_system(random_square_instance(n, 9));
  const NetworkGraph g = generate(Topology::random_connected, n, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_report(sys, g, false));
  }
}
BENCHMARK(BM_SpectralReport)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
