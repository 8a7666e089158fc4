#include <benchmark/benchmark.h>

#include "qtopo/constructions.h"

namespace {

using namespace qtopo;

void BM_RankBoundedCertified(benchmark::State& state) {
  RankBoundedSystemSpec spec;
  spec.n = static_cast<int>(state.range(0));
  spec.r = static_cast<int>(state.range(1));
  spec.certify.restarts = 64;
  for (auto _ : state) benchmark::DoNotOptimize(rank_bounded_system(spec));
}
BENCHMARK(BM_RankBoundedCertified)->Args({4, 1})->Args({6, 2})->Unit(benchmark::kMillisecond);

void BM_Up2Reconstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int r = static_cast<int>(state.range(1));
  std::vector<double> lambda;
  for (int i = 0; i < r; ++i) lambda.push_back(1.0 / (1.0 + i));
  const BobOrbitSpec spec = BobOrbitSpec::from_schmidt(lambda, haar_unitary(r, 1), haar_unitary(n, 2));
  const Up2Measurement meas = bob_up2_build(spec);
  const RVector outcomes = bob_up2_values(meas, haar_unitary(n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(bob_up2_reconstruct(meas, outcomes));
}
BENCHMARK(BM_Up2Reconstruct)->Args({4, 2})->Args({8, 8})->Args({16, 4})->Unit(benchmark::kMicrosecond);

}  // namespace
