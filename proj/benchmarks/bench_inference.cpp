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
#include "radcorr/matcher.hpp"
#include "radcorr/model.hpp"
#include "radcorr/synth.hpp"
#include "radcorr/trainer.hpp"

namespace {

struct Fixture {
  radcorr::PairRecord pair;
  radcorr::CorrespondenceNet net;
};

Fixture make_fixture(int n_max) {
  radcorr::SynthConfig conf;
  conf.max_points = n_max;
  conf.min_points = n_max / 2;
  auto pairs = radcorr::synthetic_pairs("b", radcorr::generate_synthetic(conf, 2));
  radcorr::ModelConfig mconf;
  mconf.n_max = n_max;
  return {pairs.front(), radcorr::CorrespondenceNet(mconf, 1)};
}

// Default model, untrained weights; cost does not depend on the weights.
void BM_MatchPair(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  radcorr::InferenceConfig ic;
  ic.score_space = radcorr::ScoreSpace::kRowSoftmax;
  for (auto _ : state) {
    benchmark::DoNotOptimize(radcorr::match_pair(f.pair.prev, f.pair.curr, f.net, ic));
  }
}
BENCHMARK(BM_MatchPair)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  Fixture f = make_fixture(40);
  const radcorr::LabelSet labels = radcorr::label_pair(f.pair, 0.15, radcorr::FovSpec{});
  const radcorr::TrainExample ex = radcorr::make_example(f.pair, labels, radcorr::FovSpec{}, 40);
  radcorr::CorrespondenceNet& net = f.net;
  for (auto _ : state) {
    net.params().zero_grad();
    radcorr::diff::backward(
        radcorr::row_cross_entropy(net.affinity(ex.prev, ex.curr), ex.labels));
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
