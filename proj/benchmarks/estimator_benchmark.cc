//
// Copyright 2026 The panpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cstdint>

#include "benchmark/benchmark.h"
#include "panpriv/distinct_sampling.h"
#include "panpriv/mechanisms.h"
#include "panpriv/static_estimator.h"
#include "panpriv/streamgen.h"

namespace panpriv {
namespace {

void BM_LaplaceSample(benchmark::State& state) {
  NoiseSource src(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(LaplaceSample(2.0, src));
  }
}
BENCHMARK(BM_LaplaceSample);

// Insert throughput of a static estimator; range(0) is the sample size over a
// universe of 10^6 users (dense index above ~1/8 of U, hashed below).
void BM_StaticObserve(benchmark::State& state) {
  constexpr uint64_t kU = 1000000;
  const PrivacyBudget budget = *PrivacyBudget::Create(0.2);
  StaticEstimator est = *StaticEstimator::Create(
      Variant::kOptBern, kU, static_cast<uint64_t>(state.range(0)), budget, 1);
  const Stream stream = *Generate({.length = 1 << 16, .universe_size = kU});
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.Observe(stream[i].user));
    i = (i + 1) & (stream.size() - 1);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StaticObserve)->Arg(1000)->Arg(50000)->Arg(1000000);

void BM_PpdsCreate(benchmark::State& state) {
  const PrivacyBudget budget = *PrivacyBudget::Create(0.2);
  const auto universe = static_cast<uint64_t>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PpdsEstimator::Create(universe, 1000, budget, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PpdsCreate)->Arg(10000)->Arg(100000);

void BM_PpdsObserve(benchmark::State& state) {
  constexpr uint64_t kU = 100000;
  const PrivacyBudget budget = *PrivacyBudget::Create(0.2);
  PpdsEstimator est = *PpdsEstimator::Create(
      kU, static_cast<uint64_t>(state.range(0)), budget, 1);
  const Stream stream = *Generate({.length = 1 << 16, .universe_size = kU});
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.Observe(stream[i].user));
    i = (i + 1) & (stream.size() - 1);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PpdsObserve)->Arg(100)->Arg(5000);

}  // namespace
}  // namespace panpriv

BENCHMARK_MAIN();
