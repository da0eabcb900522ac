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
#include <random>

#include <benchmark/benchmark.h>

#include "radcorr/assignment.hpp"

namespace {

Eigen::MatrixXd random_scores(int rows, int cols) {
  std::mt19937_64 rng(rows * 1000 + cols);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

void BM_SolveMaxSquare(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m = random_scores(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(radcorr::solve_max(m));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SolveMaxSquare)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_SolveMaxWide(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m = random_scores(n / 2, n);
  for (auto _ : state) benchmark::DoNotOptimize(radcorr::solve_max(m));
}
BENCHMARK(BM_SolveMaxWide)->Arg(40)->Arg(80);

}  // namespace

BENCHMARK_MAIN();
