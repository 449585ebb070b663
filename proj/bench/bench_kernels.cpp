// Parallel replica kernels against the serial reference on the same draws.
#include <benchmark/benchmark.h>

#include "heavytail/config.hpp"
#include "heavytail/products.hpp"
#include "heavytail/reference.hpp"
#include "heavytail/simulate.hpp"

namespace {

using namespace heavytail;

ModelSpec two_state() {
  return validate_spec(nlohmann::json::parse(R"({
    "d": 2, "alpha": 1.5, "beta": 2.5, "H": [[0.9, 0.1], [0.2, 0.8]],
    "regimes": [
      {"atoms": [{"direction": [1, 0], "weight": 0.8}, {"direction": [0, 1], "weight": 0.2}],
       "matrix": {"kind": "scalar_random", "base": [[0.5, 0.1], [0.0, 0.4]], "low": 0.2, "high": 1.0}},
      {"atoms": [{"direction": [1, 0], "weight": 0.3}, {"direction": [0, 1], "weight": 0.7}], "scale": 1.5,
       "matrix": {"kind": "scalar_random", "base": [[0.3, 0.0], [0.2, 0.6]], "low": 0.2, "high": 1.0}}]})"));
}

constexpr std::size_t kReps = 20000;
constexpr int kDepth = 40;

void BM_StationaryParallel(benchmark::State& state) {
  const auto spec = two_state();
  const Exec exec{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(sample_stationary(spec, kDepth, kReps, Seed{1}, exec));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kReps));
}
BENCHMARK(BM_StationaryParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_StationarySerialReference(benchmark::State& state) {
  const auto spec = two_state();
  for (auto _ : state) benchmark::DoNotOptimize(reference::stationary_horner(spec, kDepth, kReps, Seed{1}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kReps));
}
BENCHMARK(BM_StationarySerialReference)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LogNormsParallel(benchmark::State& state) {
  const auto spec = two_state();
  const Exec exec{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(log_norm_table(spec, 100, kReps / 4, Seed{2}, exec));
}
BENCHMARK(BM_LogNormsParallel)->Arg(1)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LogNormsSerialReference(benchmark::State& state) {
  const auto spec = two_state();
  for (auto _ : state) benchmark::DoNotOptimize(reference::log_norms(spec, 100, kReps / 4, Seed{2}));
}
BENCHMARK(BM_LogNormsSerialReference)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
