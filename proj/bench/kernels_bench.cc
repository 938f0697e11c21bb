// Copyright 2026 The anchorplan Authors
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

// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "anchorplan/evaluation.h"
#include "anchorplan/kernels.h"
#include "anchorplan/kmeans.h"
#include "anchorplan/perception.h"
#include "anchorplan/rng.h"
#include "anchorplan/scenario_gen.h"
#include "anchorplan/trainer.h"

namespace anchorplan {
namespace {

Tensor2 RandomTensor(int rows, int cols, uint64_t seed) {
  Rng rng(seed);
  Tensor2 t(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) t(r, c) = rng.Normal();
  }
  return t;
}

void BM_MatmulSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Tensor2 a = RandomTensor(n, n, 1), b = RandomTensor(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::MatmulSerial(a, b));
}
void BM_MatmulParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Tensor2 a = RandomTensor(n, n, 1), b = RandomTensor(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::MatmulParallel(a, b));
}
BENCHMARK(BM_MatmulSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_MatmulParallel)->Arg(64)->Arg(256);

std::vector<FlatTrajectory> ExpertPoints(int per_template) {
  std::vector<FlatTrajectory> points;
  for (const Scenario& s : GenerateBatch(1, per_template)) {
    points.push_back(Flatten(s.expert));
  }
  return points;
}

void BM_AssignSerial(benchmark::State& state) {
  const auto points = ExpertPoints(100);
  const std::vector<FlatTrajectory> centroids(points.begin(),
                                              points.begin() + 16);
  for (auto _ : state) benchmark::DoNotOptimize(AssignSerial(points, centroids));
}
void BM_AssignParallel(benchmark::State& state) {
  const auto points = ExpertPoints(100);
  const std::vector<FlatTrajectory> centroids(points.begin(),
                                              points.begin() + 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(AssignParallel(points, centroids));
  }
}
BENCHMARK(BM_AssignSerial);
BENCHMARK(BM_AssignParallel);

void BM_RasterSerial(benchmark::State& state) {
  const Scenario s = GenerateBatch(3, 1).front();
  const PerceptionConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(RasterizeBevSerial(s, cfg));
}
void BM_RasterParallel(benchmark::State& state) {
  const Scenario s = GenerateBatch(3, 1).front();
  const PerceptionConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(RasterizeBevParallel(s, cfg));
}
BENCHMARK(BM_RasterSerial);
BENCHMARK(BM_RasterParallel);

// Untrained weights; the timing depends only on the shapes.
struct EvalFixture {
  std::vector<Scenario> scenarios = GenerateBatch(2, 2);
  StaticVocabulary vocab;
  PlannerConfig pc;
  PlannerModels models{DecoderConfig{}, DenoiserConfig{}, 3};
  EvalFixture() {
    KMeansOptions ko;
    ko.seed = 7;
    vocab = KMeans(ExpertPoints(10), ko);
  }
};

void BM_EvalSerial(benchmark::State& state) {
  EvalFixture f;
  Planner planner(f.models.decoder, f.models.denoiser, f.vocab, f.pc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        EvaluateCorpusSerial(&planner, f.scenarios, {}, EpdmsConfig{}));
  }
}
void BM_EvalParallel(benchmark::State& state) {
  EvalFixture f;
  Planner planner(f.models.decoder, f.models.denoiser, f.vocab, f.pc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        EvaluateCorpusParallel(&planner, f.scenarios, {}, EpdmsConfig{}));
  }
}
BENCHMARK(BM_EvalSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalParallel)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace anchorplan

BENCHMARK_MAIN();
