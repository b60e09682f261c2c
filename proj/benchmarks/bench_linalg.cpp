#include <benchmark/benchmark.h>

#include "consflow/instances.hpp"
#include "consflow/linalg.hpp"
#include "consflow/rng.hpp"

using namespace consflow;

namespace {

DenseMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

void BM_SymEigen(benchmark::State& state) {
  const auto m = random_symmetric(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_eigenvalues(m));
  }
}
BENCHMARK(BM_SymEigen)->Arg(16)->Arg(32)->Arg(64)->Arg(100);

void BM_DirectSolve(benchmark::State& state) {
  const auto inst =
      random_square_instance(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(direct_solve(inst.a, inst.b));
  }
}
BENCHMARK(BM_DirectSolve)->Arg(8)->Arg(32)->Arg(100);

void BM_Kron(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto a = random_symmetric(n, 3);
  const auto id = DenseMatrix::identity(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kron(a, id));
  }
}
BENCHMARK(BM_Kron)->Arg(8)->Arg(16);

void BM_GeneralEigen(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(general_eigenvalues(m));
  }
}
BENCHMARK(BM_GeneralEigen)->Arg(6)->Arg(12)->Arg(25);

}  // namespace
