// Copyright 2026 The hypernews Authors. All Rights Reserved.
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

#include <numeric>

#include "hypernews/dhsl.hpp"
#include "hypernews/hyper_encoder.hpp"
#include "hypernews/model.hpp"
#include "hypernews/synthetic.hpp"

namespace {

using namespace hypernews;

constexpr Eigen::Index kDim = 64;

ModelInputs inputs_for(std::size_t n) {
  SyntheticOptions o;
  o.n_news = n;
  o.d_in = kDim;
  o.seed = 1;
  return ModelInputs::from(generate_synthetic(o).dataset);
}

ModelConfig config_for(bool dhsl) {
  ModelConfig c;
  c.d_in = kDim;
  c.d_h = 64;
  c.dhsl = dhsl;
  return c;
}

void BM_HypergraphEncoder(benchmark::State& state) {
  const ModelInputs in = inputs_for(static_cast<std::size_t>(state.range(0)));
  const bool dhsl = state.range(1) != 0;
  Rng rng(0);
  HyperEncoderParams hg = HyperEncoderParams::init(kDim, 64, 2, rng);
  DhslParams dp = DhslParams::init(kDim, 64, rng);
  for (auto _ : state) {
    Tape tape(Tape::GradMode::kInference);
    Var text = tape.constant(in.text);
    DhslModule module(tape, text, dp, 0.1);
    HgnnOutput out =
        hgnn_forward(tape, text, tape.constant(in.incidence), hg, dhsl ? &module : nullptr, 0.5, Mode::kEval, rng);
    benchmark::DoNotOptimize(out.embeddings.value().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HypergraphEncoder)->ArgsProduct({{100, 400}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_TopK(benchmark::State& state) {
  Rng rng(0);
  const Matrix s = Matrix::Random(state.range(0), state.range(0) / 4);
  for (auto _ : state) benchmark::DoNotOptimize(topk_mask(s, 0.1));
}
BENCHMARK(BM_TopK)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  const ModelInputs in = inputs_for(static_cast<std::size_t>(state.range(0)));
  const ModelConfig cfg = config_for(state.range(1) != 0);
  Rng rng(0);
  ModelParams params = ModelParams::init(cfg, rng);
  std::vector<Eigen::Index> batch(64);
  std::iota(batch.begin(), batch.end(), 0);
  for (auto _ : state) {
    Tape tape;
    ForwardResult f = model_forward(tape, in, cfg, params, Mode::kTrain, rng);
    Var loss = compute_loss(f, in, cfg, batch).total;
    benchmark::DoNotOptimize(tape.backward(loss, params.all()));
  }
}
BENCHMARK(BM_TrainStep)->ArgsProduct({{200, 400}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
