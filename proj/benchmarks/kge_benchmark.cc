/*
 * Copyright 2026 The kge-ensemble Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "kge/dataset.h"
#include "kge/embedding.h"
#include "kge/ensemble.h"
#include "kge/evaluation.h"
#include "kge/scoring.h"
#include "kge/training.h"

namespace kge {
namespace {

const Dataset& Mixed() {
  static const Dataset d = [] {
    SyntheticSpec spec;
    spec.pattern = SyntheticPattern::kMixed;
    spec.entities = 200;
    spec.fan = 4;
    spec.triples = 0;
    return GenerateSynthetic(spec, 7);
  }();
  return d;
}

TrainConfig EpochConfig(std::size_t epochs) {
  TrainConfig c;
  c.lr = 0.01;
  c.gamma = 4;
  c.batches_per_epoch = 10;
  c.max_epochs = epochs;
  c.valid_every = 1000000;
  return c;
}

// Wall time of 10 epochs; args are {k, d_l, workers}.
void BM_EnsembleEpochs(benchmark::State& state) {
  const Dataset& d = Mixed();
  const FilterIndex filter(d);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto dl = static_cast<std::size_t>(state.range(1));
  const auto workers = static_cast<std::size_t>(state.range(2));
  TrainConfig config = EpochConfig(10);
  for (auto _ : state) {
    auto trained =
        TrainEnsemble(ModelKind::kTransE, k, dl, d, filter, config, workers);
    benchmark::DoNotOptimize(trained.model.replicas.data());
  }
  state.counters["epochs"] = benchmark::Counter(10.0 * state.iterations(),
                                                benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EnsembleEpochs)
    ->Args({1, 128, 1})
    ->Args({2, 64, 2})
    ->Args({4, 32, 1})
    ->Args({4, 32, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_Score(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const ModelParams p = InitModel(kind, 1000, 10, dim, 1);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<EntityId> ent(0, 999);
  std::vector<Triple> triples(4096);
  for (Triple& t : triples)
    t = {ent(rng), static_cast<RelationId>(rng() % 10), ent(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Score(p, triples[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(std::string(ModelKindName(kind)));
}
BENCHMARK(BM_Score)->ArgsProduct({{0, 1, 2, 3}, {32, 128, 512}});

void BM_FilteredEvaluation(benchmark::State& state) {
  const Dataset& d = Mixed();
  const FilterIndex filter(d);
  const ModelParams p = InitModel(ModelKind::kComplEx, d.num_entities(),
                                  d.num_relations(), 64, 1);
  const auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        EvaluateModel(MakeScorer(p), d, filter, workers).mrr);
  }
  state.SetItemsProcessed(state.iterations() * d.test.size());
}
BENCHMARK(BM_FilteredEvaluation)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kge

BENCHMARK_MAIN();
