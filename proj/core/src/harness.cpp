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

#include "hypernews/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

namespace hypernews {

namespace {

constexpr std::array<Variant, 6> kVariants{Variant::kFull,  Variant::kNoText, Variant::kNoPro,
                                           Variant::kNoHg,  Variant::kNoCl,   Variant::kNoDhsl};

struct EvalPass {
  Matrix probs;
  std::vector<Matrix> reconstructed;
};

EvalPass eval_forward(const ModelParams& params, const ModelConfig& config, const ModelInputs& inputs) {
  // Inference tapes bind parameters as constants and never write to them.
  auto& mut = const_cast<ModelParams&>(params);
  Tape tape(Tape::GradMode::kInference);
  Rng unused(0);
  ForwardResult fwd = model_forward(tape, inputs, config, mut, Mode::kEval, unused);
  EvalPass out;
  out.probs = fwd.probs.value();
  out.reconstructed.reserve(fwd.reconstructed.size());
  for (const Var& h : fwd.reconstructed) out.reconstructed.push_back(h.value());
  return out;
}

MetricsReport score(const Matrix& probs, std::span<const int> labels, std::span<const Eigen::Index> indices) {
  if (indices.empty()) throw ContractError("evaluate: empty index set");
  std::vector<int> predicted;
  std::vector<int> truth;
  predicted.reserve(indices.size());
  truth.reserve(indices.size());
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= probs.rows()) throw ContractError("evaluate: index out of range");
    predicted.push_back(probs(i, 1) > probs(i, 0) ? 1 : 0);
    truth.push_back(labels[static_cast<std::size_t>(i)]);
  }
  return metrics_from_confusion(confusion_from(predicted, truth));
}

ProtocolReport summarize_runs(std::vector<RunResult> runs) {
  ProtocolReport report;
  std::vector<double> acc;
  std::vector<double> f1;
  for (const RunResult& r : runs) {
    acc.push_back(r.test.accuracy);
    f1.push_back(r.test.macro_f1);
  }
  report.accuracy = summarize(acc);
  report.macro_f1 = summarize(f1);
  report.runs = std::move(runs);
  return report;
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (!(adam.lr >= 0.0)) throw ConfigError("train.lr must be non-negative");
  if (repeats < 1) throw ConfigError("train.repeats must be at least 1");
  double total = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

MetricsReport evaluate(const ModelParams& params, const ModelConfig& config, const ModelInputs& inputs,
                       std::span<const Eigen::Index> indices) {
  if (indices.empty()) throw ContractError("evaluate: empty index set");
  return score(eval_forward(params, config, inputs).probs, inputs.labels, indices);
}

std::vector<double> predict_fake_probability(const ModelParams& params, const ModelConfig& config,
                                             const ModelInputs& inputs) {
  Matrix probs = eval_forward(params, config, inputs).probs;
  std::vector<double> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) out[static_cast<std::size_t>(i)] = probs(i, 1);
  return out;
}

TrainResult train(const TrainConfig& config, const ModelInputs& inputs, const DatasetSplit& split,
                  ModelParams params, Rng& rng, int run_index, const EpochObserver& observer) {
  config.validate();
  if (split.train.empty()) throw ContractError("train: empty training set");
  if (split.val.empty()) throw ContractError("train: empty validation set");

  std::vector<Parameter*> list = params.all();
  Adam adam(list, config.adam);
  std::vector<Eigen::Index> order = split.train;

  TrainResult result{params, 0, -1.0, {}};
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0, ce_sum = 0.0, cl_sum = 0.0;
    std::size_t seen = 0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::span<const Eigen::Index> batch(order.data() + start, stop - start);

      Tape tape;
      ForwardResult fwd = model_forward(tape, inputs, config.model, params, Mode::kTrain, rng);
      LossTerms loss = compute_loss(fwd, inputs, config.model, batch);
      const double total = loss.total.value()(0, 0);
      if (!std::isfinite(total)) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_no + 1));
      }
      Gradients grads = tape.backward(loss.total, list);
      adam.step(grads);

      const auto w = static_cast<double>(batch.size());
      loss_sum += total * w;
      ce_sum += loss.ce.value()(0, 0) * w;
      if (loss.cl.valid()) cl_sum += loss.cl.value()(0, 0) * w;
      seen += batch.size();
    }

    EvalPass pass = eval_forward(params, config.model, inputs);
    MetricsReport val = score(pass.probs, inputs.labels, split.val);
    const auto n = static_cast<double>(seen);
    EpochLog row{run_index, epoch, loss_sum / n, ce_sum / n, cl_sum / n, val.accuracy, val.macro_f1};
    result.log.push_back(row);
    spdlog::debug("run {} epoch {}: loss {:.6f} ce {:.6f} cl {:.6f} val_acc {:.4f} val_f1 {:.4f}", run_index, epoch,
                  row.train_loss, row.ce, row.cl, row.val_acc, row.val_f1);
    if (observer) observer(row, pass.reconstructed);

    if (val.accuracy >= result.best_val_acc) {
      result.best_val_acc = val.accuracy;
      result.best_epoch = epoch;
      result.best_params = params;
    }
  }
  return result;
}

RunResult run_single(const TrainConfig& config, const ModelInputs& inputs, std::uint64_t seed, int run_index,
                     const EpochObserver& observer) {
  config.validate();
  Rng rng(seed);
  DatasetSplit split = split_dataset(inputs.labels, config.ratios, rng);
  split.seed = seed;
  ModelParams params = ModelParams::init(config.model, rng);
  TrainResult training = train(config, inputs, split, std::move(params), rng, run_index, observer);
  MetricsReport test = evaluate(training.best_params, config.model, inputs, split.test);
  RunResult run{seed, std::move(split), std::move(training), test};
  spdlog::info("run {} (seed {}): best epoch {} val_acc {:.4f} test_acc {:.4f} test_f1 {:.4f}", run_index, seed,
               run.training.best_epoch, run.training.best_val_acc, run.test.accuracy, run.test.macro_f1);
  return run;
}

ProtocolReport run_protocol(const TrainConfig& config, const ModelInputs& inputs, const EpochObserver& observer) {
  config.validate();
  std::vector<RunResult> runs;
  runs.reserve(static_cast<std::size_t>(config.repeats));
  for (int r = 0; r < config.repeats; ++r) {
    runs.push_back(run_single(config, inputs, config.seed + static_cast<std::uint64_t>(r), r, observer));
  }
  return summarize_runs(std::move(runs));
}

ProtocolReport repeat_runs(const TrainConfig& config, const ModelInputs& inputs, int n,
                           const EpochObserver& observer) {
  if (n < 2) throw ConfigError("repeat_runs needs at least 2 repeats, got " + std::to_string(n));
  TrainConfig c = config;
  c.repeats = n;
  return run_protocol(c, inputs, observer);
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoText: return "w/o Text";
    case Variant::kNoPro: return "w/o Pro";
    case Variant::kNoHg: return "w/o HG";
    case Variant::kNoCl: return "w/o CL";
    case Variant::kNoDhsl: return "w/o DHSL";
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kVariants) {
    if (variant_name(v) == name) return v;
  }
  std::string valid;
  for (Variant v : kVariants) {
    if (!valid.empty()) valid += ", ";
    valid += '"';
    valid += variant_name(v);
    valid += '"';
  }
  throw ConfigError("unknown variant \"" + std::string(name) + "\"; valid variants: " + valid);
}

std::vector<Variant> all_variants() { return {kVariants.begin(), kVariants.end()}; }

TrainConfig apply_variant(TrainConfig config, Variant v) {
  switch (v) {
    case Variant::kFull: break;
    case Variant::kNoText: config.model.use_text = false; break;
    case Variant::kNoPro: config.model.use_pro = false; break;
    case Variant::kNoHg: config.model.use_hg = false; break;
    case Variant::kNoCl: config.model.contrastive = false; break;
    case Variant::kNoDhsl: config.model.dhsl = false; break;
  }
  return config;
}

ProtocolReport run_ablation(const TrainConfig& config, const ModelInputs& inputs, Variant v,
                            const EpochObserver& observer) {
  return run_protocol(apply_variant(config, v), inputs, observer);
}

std::vector<double> default_pthd_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

std::vector<SweepRow> sweep_pthd(const TrainConfig& config, const ModelInputs& inputs, std::vector<double> grid,
                                 const EpochObserver& observer) {
  if (grid.empty()) throw ConfigError("sweep: empty p_thd grid");
  std::sort(grid.begin(), grid.end());
  std::vector<SweepRow> rows;
  for (double p : grid) {
    TrainConfig c = config;
    c.model.p_thd = p;
    rows.push_back({p, run_protocol(c, inputs, observer)});
  }
  return rows;
}

}  // namespace hypernews
