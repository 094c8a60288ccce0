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

#include "benchmark/benchmark.h"
#include "panpriv/bounds.h"

namespace panpriv {
namespace {

void BM_TightestBeta(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        TightestBeta(Variant::kOptBern, 0.2, 0.1, 50000));
  }
}
BENCHMARK(BM_TightestBeta);

void BM_OptimalSampleSize(benchmark::State& state) {
  const Variant variant = state.range(0) == 0 ? Variant::kDwork
                                              : Variant::kOptBern;
  for (auto _ : state) {
    benchmark::DoNotOptimize(OptimalSampleSize(variant, 0.2, 0.1, 0.1));
  }
}
BENCHMARK(BM_OptimalSampleSize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace panpriv
