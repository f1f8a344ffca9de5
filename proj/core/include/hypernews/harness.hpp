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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hypernews/dataset.hpp"
#include "hypernews/metrics.hpp"
#include "hypernews/model.hpp"
#include "hypernews/optim.hpp"

namespace hypernews {

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  ModelConfig model;
  int epochs = 200;
  std::size_t batch_size = 64;
  AdamOptions adam;  // lr defaults to 0.001
  std::uint64_t seed = 0;
  int repeats = 20;
  SplitRatios ratios = kDefaultRatios;

  void validate() const;
};

struct EpochLog {
  int run = 0;
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double ce = 0.0;
  double cl = 0.0;
  double val_acc = 0.0;
  double val_f1 = 0.0;

  bool operator==(const EpochLog&) const = default;
};

/// Called after every epoch with the log row and the per-layer H_re of the
/// validation forward pass (empty when the hypergraph view is off).
using EpochObserver = std::function<void(const EpochLog&, std::span<const Matrix> reconstructed)>;

struct TrainResult {
  ModelParams best_params;
  int best_epoch = 0;
  double best_val_acc = 0.0;
  std::vector<EpochLog> log;
};

/// One seeded training run on a fixed split.
///
/// Random stream (`rng`), in order: per epoch the shuffle of training indices,
/// then dropout masks of each batch's forward pass. Validation runs in eval mode
/// after every epoch; the checkpoint with the best validation accuracy is kept
/// (ties go to the later epoch).
TrainResult train(const TrainConfig& config, const ModelInputs& inputs, const DatasetSplit& split,
                  ModelParams params, Rng& rng, int run_index = 0, const EpochObserver& observer = {});

/// Eval-mode forward and metrics over `indices`. Throws ContractError when empty.
MetricsReport evaluate(const ModelParams& params, const ModelConfig& config, const ModelInputs& inputs,
                       std::span<const Eigen::Index> indices);

/// Class-1 probabilities for every news item (eval mode).
std::vector<double> predict_fake_probability(const ModelParams& params, const ModelConfig& config,
                                             const ModelInputs& inputs);

struct RunResult {
  std::uint64_t seed = 0;
  DatasetSplit split;
  TrainResult training;
  MetricsReport test;
};

/// Split, initialize and train from one seed, then score the best checkpoint on
/// the test set. Stream order of Rng(seed): split, parameter init, training.
RunResult run_single(const TrainConfig& config, const ModelInputs& inputs, std::uint64_t seed, int run_index = 0,
                     const EpochObserver& observer = {});

struct ProtocolReport {
  std::vector<RunResult> runs;
  Summary accuracy;
  Summary macro_f1;
};

/// `config.repeats` runs with seeds seed, seed+1, ...; each gets a fresh split.
ProtocolReport run_protocol(const TrainConfig& config, const ModelInputs& inputs, const EpochObserver& observer = {});

/// run_protocol with exactly n >= 2 repeats.
ProtocolReport repeat_runs(const TrainConfig& config, const ModelInputs& inputs, int n,
                           const EpochObserver& observer = {});

enum class Variant { kFull, kNoText, kNoPro, kNoHg, kNoCl, kNoDhsl };

/// "full", "w/o Text", "w/o Pro", "w/o HG", "w/o CL", "w/o DHSL".
std::string_view variant_name(Variant v);
/// Throws ConfigError listing the valid names.
Variant parse_variant(std::string_view name);
std::vector<Variant> all_variants();

/// The config with the variant's component switched off.
TrainConfig apply_variant(TrainConfig config, Variant v);

ProtocolReport run_ablation(const TrainConfig& config, const ModelInputs& inputs, Variant v,
                            const EpochObserver& observer = {});

struct SweepRow {
  double p_thd = 0.0;
  ProtocolReport report;
};

/// 0.0, 0.1, ..., 1.0 (computed as i / 10).
std::vector<double> default_pthd_grid();

/// One protocol run per grid value (ascending), all with the same seed.
std::vector<SweepRow> sweep_pthd(const TrainConfig& config, const ModelInputs& inputs, std::vector<double> grid,
                                 const EpochObserver& observer = {});

}  // namespace hypernews
