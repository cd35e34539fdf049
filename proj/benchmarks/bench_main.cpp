// Copyright 2026 The SmoothMix Authors
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

#include <vector>

#include "smoothmix/adversary.hpp"
#include "smoothmix/nn.hpp"
#include "smoothmix/smoothing.hpp"
#include "smoothmix/stats.hpp"
#include "smoothmix/theory.hpp"
#include "smoothmix/training.hpp"

namespace smoothmix {
namespace {

ModelParams net(int d, int width, int classes) {
  const std::vector<int> hidden = {width, width};
  return make_mlp(d, hidden, classes, 7);
}

Matrix inputs(int d, int count, RngStream& rng) {
  Matrix xs(d, count);
  for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = rng.normal();
  return xs;
}

void BM_ForwardBatch(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  const ModelParams p = net(d, width, 10);
  RngStream rng(1, "bench/forward", 0);
  const Matrix xs = inputs(d, 256, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(p, xs));
  state.SetItemsProcessed(state.iterations() * xs.cols());
}
BENCHMARK(BM_ForwardBatch)->Args({2, 64})->Args({784, 256});

void BM_WeightedCrossEntropy(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  const ModelParams p = net(d, width, 10);
  RngStream rng(1, "bench/backward", 0);
  const Matrix xs = inputs(d, 256, rng);
  Matrix targets = Matrix::Zero(10, 256);
  for (int i = 0; i < 256; ++i) targets(i % 10, i) = 1.0;
  const Vector weights = Vector::Constant(256, 1.0 / 256.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_cross_entropy(p, xs, targets, weights, true, false));
  }
  state.SetItemsProcessed(state.iterations() * xs.cols());
}
BENCHMARK(BM_WeightedCrossEntropy)->Args({2, 64})->Args({784, 256});

void BM_Certify(benchmark::State& state) {
  const ModelParams p = net(2, 64, 2);
  SmoothingConfig cfg;
  cfg.n = state.range(0);
  const Vector x = Vector::Constant(2, 0.3);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, "bench/certify", i++);
    benchmark::DoNotOptimize(certify(p, x, cfg, rng));
  }
}
BENCHMARK(BM_Certify)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ClopperPearson(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(clopper_pearson_lower(n * 9 / 10, n, 0.001));
}
BENCHMARK(BM_ClopperPearson)->Arg(1000)->Arg(100000);

void BM_SmoothMixMinibatch(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  const ModelParams p = net(d, width, 10);
  RngStream data(1, "bench/smoothmix", 0);
  const Matrix xs = inputs(d, 64, data);
  std::vector<int> labels;
  for (int i = 0; i < 64; ++i) labels.push_back(i % 10);
  SmoothMixConfig cfg;
  std::uint64_t round = 0;
  for (auto _ : state) {
    std::vector<RngStream> rngs;
    for (int i = 0; i < 64; ++i) rngs.emplace_back(round, "bench/smoothmix-example", i);
    ++round;
    benchmark::DoNotOptimize(smoothmix_minibatch(p, xs, labels, cfg, rngs));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SmoothMixMinibatch)->Args({2, 64})->Args({784, 256})->Unit(benchmark::kMillisecond);

void BM_WorstCaseProb(benchmark::State& state) {
  TheorySimConfig cfg;
  cfg.d = static_cast<int>(state.range(0));
  cfg.trials = 1 << 14;
  for (auto _ : state) {
    RngStream rng(1, "bench/theory", 0);
    benchmark::DoNotOptimize(worst_case_prob(cfg, 0.1, Vector(), rng));
  }
  state.SetItemsProcessed(state.iterations() * cfg.trials * cfg.d);
}
BENCHMARK(BM_WorstCaseProb)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace smoothmix

BENCHMARK_MAIN();
