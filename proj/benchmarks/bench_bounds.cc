#include <benchmark/benchmark.h>

#include "qtopo/tables.h"
#include "qtopo/topo_bounds.h"

namespace {

using namespace qtopo;

void BM_StiefelBounds(benchmark::State& state) {
  const StiefelParams p(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(stiefel_bounds(p));
}
BENCHMARK(BM_StiefelBounds)->Args({17, 5})->Args({129, 65})->Args({1025, 257});

void BM_SigmaSeriesOracle(benchmark::State& state) {
  const StiefelParams p(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sigma_series_oracle(p));
}
BENCHMARK(BM_SigmaSeriesOracle)->Args({64, 17})->Args({129, 65});

void BM_FlagBounds(benchmark::State& state) {
  std::vector<Int> parts{state.range(0)};
  parts.insert(parts.end(), static_cast<std::size_t>(state.range(1)), 1);
  const FlagPartition p(parts);
  for (auto _ : state) benchmark::DoNotOptimize(flag_bounds(p));
}
BENCHMARK(BM_FlagBounds)->Args({10, 4})->Args({40, 20});

void BM_ComputeTable(benchmark::State& state) {
  const TableId id = all_tables()[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) benchmark::DoNotOptimize(compute_table(id));
  state.SetLabel(table_name(id));
}
BENCHMARK(BM_ComputeTable)->DenseRange(0, 3);

}  // namespace
