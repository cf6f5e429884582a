// Serial reference kernels against their OpenMP counterparts.
// Second argument: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "lrdecon/estimator.hpp"
#include "lrdecon/experiment.hpp"
#include "lrdecon/grid.hpp"
#include "lrdecon/meyer.hpp"
#include "lrdecon/model.hpp"

namespace {

using namespace lrdecon;

SampledField random_field(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (auto& x : v) x = z(rng);
  return SampledField(n, std::move(v));
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::kSerial : Exec::kParallel; }

void BM_Forward2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const meyer::MeyerBasis basis(n);
  const auto f = random_field(n);
  for (auto _ : state) benchmark::DoNotOptimize(basis.forward_2d(f, basis.max_level(), basis.max_level(), exec_of(state)));
}

void BM_Inverse2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const meyer::MeyerBasis basis(n);
  const auto c = basis.forward_2d(random_field(n), basis.max_level(), basis.max_level());
  for (auto _ : state) benchmark::DoNotOptimize(basis.inverse_2d(c, exec_of(state)));
}

void BM_ConvolveColumns(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = model::make_kernel(n);
  const auto f = random_field(n);
  for (auto _ : state) benchmark::DoNotOptimize(model::convolve_columns(f, g, exec_of(state)));
}

void BM_Spectrum2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = random_field(n);
  for (auto _ : state) benchmark::DoNotOptimize(grid::spectrum_2d(f, exec_of(state)));
}

void BM_EstimateCoefficients(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const meyer::MeyerBasis basis(n);
  const auto g = model::make_kernel(n);
  const auto y = random_field(n);
  for (auto _ : state) benchmark::DoNotOptimize(estimator::estimate_coefficients(y, g, basis, 5, 5, exec_of(state)));
}

// Monte Carlo runs spread over threads; jobs = 1 is the serial reference.
void BM_SimulateRuns(benchmark::State& state) {
  config::ExperimentConfig c;
  c.n = static_cast<int>(state.range(0));
  c.runs = 8;
  c.jobs = state.range(1) == 0 ? 1 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(experiment::simulate(c));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {256, 1024})
    for (int e : {0, 1}) b->Args({n, e});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Forward2D)->Apply(sizes);
BENCHMARK(BM_Inverse2D)->Apply(sizes);
BENCHMARK(BM_ConvolveColumns)->Apply(sizes);
BENCHMARK(BM_Spectrum2D)->Apply(sizes);
BENCHMARK(BM_EstimateCoefficients)->Apply(sizes);
BENCHMARK(BM_SimulateRuns)->Apply(sizes);

BENCHMARK_MAIN();
