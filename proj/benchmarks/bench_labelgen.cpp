// Copyright 2026, The radcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <benchmark/benchmark.h>

#include "radcorr/dataset.hpp"
#include "radcorr/labelgen.hpp"
#include "radcorr/synth.hpp"

namespace {

void BM_GenerateLabels(benchmark::State& state) {
  radcorr::SynthConfig conf;
  conf.min_points = static_cast<int>(state.range(0)) / 2;
  conf.max_points = static_cast<int>(state.range(0));
  const auto pairs = radcorr::synthetic_pairs("b", radcorr::generate_synthetic(conf, 2));
  const radcorr::PairRecord& p = pairs.front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(radcorr::generate_labels(p.prev, p.curr, p.relative, 0.15));
  }
}
BENCHMARK(BM_GenerateLabels)->Arg(40)->Arg(100);

void BM_GenerateSynthetic(benchmark::State& state) {
  radcorr::SynthConfig conf;
  for (auto _ : state) benchmark::DoNotOptimize(radcorr::generate_synthetic(conf, 51));
}
BENCHMARK(BM_GenerateSynthetic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
