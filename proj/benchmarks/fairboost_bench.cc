// Copyright 2026 The fairboost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "fairboost/audit.h"
#include "fairboost/gbm.h"
#include "fairboost/interpret.h"
#include "fairboost/synthgen.h"
#include "fairboost/tree.h"

namespace fairboost {
namespace {

Dataset Population(std::uint64_t n) {
  GeneratorSpec spec = DefaultGeneratorSpec();
  spec.n = n;
  spec.seed = 11;
  return Generate(spec);
}

void BM_Generate(benchmark::State& state) {
  GeneratorSpec spec = DefaultGeneratorSpec();
  spec.n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Generate(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FitTree(benchmark::State& state) {
  const Dataset data = Population(static_cast<std::uint64_t>(state.range(0)));
  const FeatureMatrix x{data.features(), data.n_rows(), data.n_features()};
  std::vector<double> grad(data.n_rows()), hess(data.n_rows(), 0.25);
  for (std::size_t i = 0; i < data.n_rows(); ++i) grad[i] = data.label(i) == 2 ? -0.9 : 0.1;
  std::vector<std::size_t> rows(data.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  const TreeBuilder builder(x);
  const TreeParams params{4, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(builder.Fit(rows, grad, hess, params));
}
BENCHMARK(BM_FitTree)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State& state) {
  const Dataset data = Population(static_cast<std::uint64_t>(state.range(0)));
  GbmConfig cfg;
  cfg.n_rounds = 50;
  for (auto _ : state) benchmark::DoNotOptimize(Train(data, cfg));
}
BENCHMARK(BM_Train)->Arg(5000)->Arg(25000)->Unit(benchmark::kMillisecond);

void BM_PredictAndAudit(benchmark::State& state) {
  const Dataset data = Population(20000);
  GbmConfig cfg;
  cfg.n_rounds = 100;
  const BoostModel model = Train(data, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(AuditByGroup(model, data));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.n_rows()));
}
BENCHMARK(BM_PredictAndAudit)->Unit(benchmark::kMillisecond);

void BM_PartialDependence(benchmark::State& state) {
  const Dataset data = Population(5000);
  GbmConfig cfg;
  cfg.n_rounds = 50;
  const BoostModel model = Train(data, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(PartialDependence(model, data, "age", BinningRule{}, 2));
}
BENCHMARK(BM_PartialDependence)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fairboost

BENCHMARK_MAIN();
