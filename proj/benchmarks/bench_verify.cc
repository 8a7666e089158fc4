#include <benchmark/benchmark.h>

#include "qtopo/constructions.h"
#include "qtopo/verify.h"

namespace {

using namespace qtopo;

void BM_Injectivity(benchmark::State& state) {
  RankBoundedSystemSpec spec;
  spec.n = 4;
  spec.r = 1;
  const OperatorSystem sys = rank_bounded_system(spec).system;
  const PairSampler sampler = rank_bounded_pair_sampler(4, 1);
  VerifyOptions vo;
  vo.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(check_injectivity(sys, sampler, 2000, vo));
}
BENCHMARK(BM_Injectivity)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Immersion(benchmark::State& state) {
  const BobOrbitSpec spec = BobOrbitSpec::from_schmidt({0.8, 0.6}, haar_unitary(2, 1), haar_unitary(5, 2));
  const OperatorSystem sys = bob_up2_system(bob_up2_build(spec));
  const UnitaryOrbit orbit = UnitaryOrbit::bob(spec);
  for (auto _ : state) benchmark::DoNotOptimize(check_immersion(sys, orbit, 20));
}
BENCHMARK(BM_Immersion)->Unit(benchmark::kMillisecond);

}  // namespace
