/**
 * Copyright 2026 The corpus-denoise Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <benchmark/benchmark.h>

#include <vector>

#include "denoise/augment.hpp"
#include "denoise/calibration.hpp"
#include "denoise/corrector.hpp"
#include "denoise/oracle.hpp"
#include "denoise/world.hpp"

namespace {

using namespace denoise;

struct Fixture {
  WorldModel world;
  ConfusionTable table;
  PairCorpus corpus;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    WorldConfig wc;
    const auto world = WorldModel::build(wc);
    ConfusionConfig cc;
    const auto table = ConfusionTable::build(wc.vocab_size, cc);
    CorpusConfig pc;
    pc.n_sentences = 10000;
    pc.mode = CorruptionMode::kSingleEdit;
    return Fixture{world, table, generate_corpus(world, table, pc)};
  }();
  return f;
}

void BM_Train(benchmark::State& state) {
  const auto& f = fixture();
  const PairCorpus corpus(f.corpus.begin(), f.corpus.begin() + state.range(0));
  std::size_t chars = 0;
  for (const auto& r : corpus) chars += r.corrupted.size();
  for (auto _ : state) benchmark::DoNotOptimize(CorrectorModel::train(corpus, f.world.vocab_size()));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * chars));
}
BENCHMARK(BM_Train)->Arg(1000)->Arg(10000);

void BM_Predict(benchmark::State& state) {
  const auto& f = fixture();
  const auto model = CorrectorModel::train(f.corpus, f.world.vocab_size());
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& r = f.corpus[k++ % f.corpus.size()];
    benchmark::DoNotOptimize(model.predict(r.corrupted, r.corrupted.size() / 2));
  }
}
BENCHMARK(BM_Predict);

void BM_Posterior(benchmark::State& state) {
  const auto& f = fixture();
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior(f.world, f.table, f.corpus[k++ % f.corpus.size()], 0, 0.1));
  }
}
BENCHMARK(BM_Posterior);

void BM_BruteForce(benchmark::State& state) {
  WorldConfig wc;
  wc.vocab_size = 6;
  wc.support = 3;
  const auto world = WorldModel::build(wc);
  ConfusionConfig cc;
  cc.candidates = 3;
  const auto table = ConfusionTable::build(wc.vocab_size, cc);
  CorpusConfig pc;
  pc.n_sentences = 64;
  pc.length = {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0))};
  pc.mode = CorruptionMode::kSingleEdit;
  const auto corpus = generate_corpus(world, table, pc);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_posterior(world, table, corpus[k++ % corpus.size()], 0, 0.1));
  }
}
BENCHMARK(BM_BruteForce)->Arg(3)->Arg(5)->Arg(7);

void BM_Ece(benchmark::State& state) {
  Rng rng(1);
  std::vector<PredictionOutcome> outcomes;
  for (std::int64_t k = 0; k < state.range(0); ++k) {
    const double c = rng.uniform();
    outcomes.push_back({c, rng.uniform() < c, c});
  }
  for (auto _ : state) benchmark::DoNotOptimize(ece(outcomes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ece)->Arg(10000)->Arg(1000000);

}  // namespace

BENCHMARK_MAIN();
