// Microbenchmarks for the hot paths: sector enumeration, Hamiltonian
// assembly, per-sector eigensolves, the global sector search, and the
// variational minimizer.  Run with --benchmark_filter=<regex> to select.

#include <benchmark/benchmark.h>

#include <trilevel/model.hpp>
#include <trilevel/quantum.hpp>
#include <trilevel/scan.hpp>
#include <trilevel/semiclassical.hpp>

namespace {

using trilevel::Configuration;
using trilevel::ModelParams;

ModelParams cascade_params(int n_atoms) {
  ModelParams params;
  params.config = Configuration::Xi;
  params.n_atoms = n_atoms;
  params.omega2 = 1.0;
  params.omega3 = 2.0;
  params.mu12 = 1.5;
  params.mu23 = 1.0;
  return params;
}

void BM_EnumerateSector(benchmark::State& state) {
  const int n_atoms = static_cast<int>(state.range(0));
  const int m_total = static_cast<int>(state.range(1));
  std::size_t dimension = 0;
  for (auto _ : state) {
    auto basis = trilevel::quantum::enumerate_sector(Configuration::Xi,
                                                     n_atoms, m_total);
    dimension = basis.dimension();
    benchmark::DoNotOptimize(basis);
  }
  state.counters["dim"] = static_cast<double>(dimension);
}

void BM_BuildHamiltonian(benchmark::State& state) {
  const int n_atoms = static_cast<int>(state.range(0));
  const int m_total = static_cast<int>(state.range(1));
  const auto params = cascade_params(n_atoms);
  const auto basis =
      trilevel::quantum::enumerate_sector(params.config, n_atoms, m_total);
  for (auto _ : state) {
    auto h = trilevel::quantum::build_hamiltonian(basis, params);
    benchmark::DoNotOptimize(h.data());
  }
  state.counters["dim"] = static_cast<double>(basis.dimension());
}

void BM_SectorGround(benchmark::State& state) {
  const int n_atoms = static_cast<int>(state.range(0));
  const int m_total = static_cast<int>(state.range(1));
  const auto params = cascade_params(n_atoms);
  const auto basis =
      trilevel::quantum::enumerate_sector(params.config, n_atoms, m_total);
  for (auto _ : state) {
    auto pair = trilevel::quantum::sector_ground(basis, params);
    benchmark::DoNotOptimize(pair.value);
    benchmark::DoNotOptimize(pair.vector.data());
  }
  state.counters["dim"] = static_cast<double>(basis.dimension());
}

void BM_GlobalGround(benchmark::State& state) {
  const int n_atoms = static_cast<int>(state.range(0));
  const auto params = cascade_params(n_atoms);
  for (auto _ : state) {
    auto result = trilevel::quantum::global_ground(params);
    benchmark::DoNotOptimize(result.energy);
  }
}

void BM_Minimize(benchmark::State& state) {
  const auto params = cascade_params(1);
  for (auto _ : state) {
    auto result = trilevel::semiclassical::minimize(params);
    benchmark::DoNotOptimize(result.energy_per_atom);
  }
}

void BM_SeparatrixCurve(benchmark::State& state) {
  ModelParams params;
  params.config = Configuration::Xi;
  params.omega2 = 1.0;
  params.omega3 = 2.0;
  trilevel::semiclassical::CouplingRange range;
  range.steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto curve =
        trilevel::semiclassical::separatrix(params.config, params, range);
    benchmark::DoNotOptimize(curve);
  }
}

void BM_ScanSemiclassical(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  trilevel::scan::ScanSpec spec;
  spec.base = cascade_params(2);
  spec.engine = trilevel::scan::Engine::Semiclassical;
  spec.x = {"mu12", 0.0, 3.0, steps};
  spec.y = {"mu23", 0.0, 3.0, steps};
  spec.threads = 1;
  for (auto _ : state) {
    auto result = trilevel::scan::run_scan(spec);
    benchmark::DoNotOptimize(result);
  }
  state.counters["points"] = static_cast<double>(steps) * steps;
}

BENCHMARK(BM_EnumerateSector)
    ->Args({10, 10})
    ->Args({30, 30})
    ->Args({60, 60});
BENCHMARK(BM_BuildHamiltonian)
    ->Args({10, 10})
    ->Args({30, 30})
    ->Args({60, 60});
BENCHMARK(BM_SectorGround)->Args({10, 10})->Args({30, 30})->Args({60, 60});
BENCHMARK(BM_GlobalGround)->Arg(2)->Arg(10)->Arg(30);
BENCHMARK(BM_Minimize);
BENCHMARK(BM_SeparatrixCurve)->Arg(101)->Arg(1001);
BENCHMARK(BM_ScanSemiclassical)->Arg(8)->Arg(16);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
    return 1;
  }
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
