#include <benchmark/benchmark.h>

#include "plim/eigensolve.hpp"
#include "plim/fractal_string.hpp"
#include "plim/laakso.hpp"
#include "plim/levels.hpp"
#include "plim/mesh.hpp"
#include "plim/pate_a_choux.hpp"

namespace {

using namespace plim;

// a Laakso level-2 pencil with roughly `n` unknowns
DiscreteOperator laakso_pencil(int n) {
  const Tower t = build_laakso({{2, 2}, 8, Boundary::neumann});
  const double edges = static_cast<double>(t.top().edge_count());
  int r = 1;
  while (edges * r < n) r *= 2;
  return assemble(discretize(t.top(), 1.0 / (4.0 * r)));
}

void BM_Dense(benchmark::State& state) {
  const DiscreteOperator d = laakso_pencil(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_dense(d, Selection::smallest(40)));
  state.counters["n"] = static_cast<double>(d.size());
}

void BM_Lanczos(benchmark::State& state) {
  const DiscreteOperator d = laakso_pencil(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lanczos(d, Selection::smallest(40)));
  state.counters["n"] = static_cast<double>(d.size());
}

void BM_BuildLaakso(benchmark::State& state) {
  const LaaksoSpec spec{{2, 2, 3, 2}, static_cast<int>(state.range(0)), Boundary::neumann};
  for (auto _ : state) benchmark::DoNotOptimize(build_laakso(spec));
}

void BM_BuildGasket(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_gasket(static_cast<int>(state.range(0))));
}

void BM_BuildChoux(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_choux({m, m, Boundary::dirichlet}));
}

void BM_GasketSpectrum(benchmark::State& state) {
  const GasketGraph g = build_gasket(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gasket_graph_spectrum(g, Boundary::dirichlet));
}

void BM_LaaksoLevels(benchmark::State& state) {
  const LaaksoSpec spec{{2, 2, 2}, 32, Boundary::neumann};
  const Tower t = build_laakso(spec);
  LevelOptions opt;
  opt.selection = Selection::up_to(200.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_levels(t, laakso_pitch(spec), opt));
}

void BM_StringAnalytic(benchmark::State& state) {
  StringSpec s;
  for (int i = 1; i <= 8; ++i) {
    s.lengths.push_back(1.0 / (1 << i));
    s.mults.push_back(i);
  }
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(string_analytic_spectrum(s, lambda));
}

}  // namespace

BENCHMARK(BM_Dense)->Arg(300)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lanczos)->Arg(300)->Arg(600)->Arg(1200)->Arg(2400)->Arg(9600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildLaakso)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGasket)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildChoux)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GasketSpectrum)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LaaksoLevels)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StringAnalytic)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
