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

#include "hypernews/model.hpp"

#include <array>
#include <optional>

#include <spdlog/spdlog.h>

namespace hypernews {

void ModelConfig::validate() const {
  if (d_in <= 0 || d_h <= 0) throw ConfigError("model dimensions must be positive");
  if (layers_gnn < 1 || layers_hgnn < 1) throw ConfigError("encoders need at least one layer");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("model.dropout must lie in [0, 1)");
  if (p_thd < 0.0 || p_thd > 1.0) throw ConfigError("model.p_thd must lie in [0, 1]");
  if (!(tau > 0.0)) throw ConfigError("model.tau must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("model.lambda must be non-negative");
  if (!use_text && !use_pro && !use_hg) throw ConfigError("at least one view must be enabled");
}

ModelParams ModelParams::init(const ModelConfig& config, Rng& rng) {
  config.validate();
  const Eigen::Index d_in = config.d_in;
  const Eigen::Index d_h = config.d_h;
  Parameter text_w("text.w", glorot_uniform(d_in, d_h, rng));
  Parameter text_b("text.b", Matrix::Zero(1, d_h));
  PropEncoderParams prop = PropEncoderParams::init(d_in, d_h, config.layers_gnn, rng);
  HyperEncoderParams hg = HyperEncoderParams::init(d_in, d_h, config.layers_hgnn, rng);
  DhslParams dhsl = DhslParams::init(d_in, d_h, rng);
  Parameter fusion("fusion.beta", Matrix::Zero(1, 3));
  Parameter head_w("head.w", glorot_uniform(d_h, 2, rng));
  Parameter head_b("head.b", Matrix::Zero(1, 2));
  return ModelParams{std::move(text_w), std::move(text_b), std::move(prop),   std::move(hg),
                     std::move(dhsl),   std::move(fusion), std::move(head_w), std::move(head_b)};
}

std::vector<Parameter*> ModelParams::all() {
  std::vector<Parameter*> out{&text_w, &text_b};
  prop.collect(out);
  hg.collect(out);
  dhsl.collect(out);
  out.push_back(&fusion);
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

std::vector<const Parameter*> ModelParams::all() const {
  auto mut = const_cast<ModelParams*>(this)->all();
  return {mut.begin(), mut.end()};
}

std::vector<Parameter*> ModelParams::text_view() { return {&text_w, &text_b}; }

std::vector<Parameter*> ModelParams::prop_view() {
  std::vector<Parameter*> out;
  prop.collect(out);
  return out;
}

std::vector<Parameter*> ModelParams::hg_view() {
  std::vector<Parameter*> out;
  hg.collect(out);
  dhsl.collect(out);
  return out;
}

ModelInputs ModelInputs::from(const Dataset& data) {
  ModelInputs in;
  in.text = data.text_matrix();
  in.incidence = data.hypergraph.incidence;
  in.prop = PropGraph::build(data.trees);
  in.labels = data.labels();
  return in;
}

Var fuse_views(const ViewEmbeddings& views, const Var& beta) {
  if (beta.rows() != 1 || beta.cols() != 3) throw ContractError("fuse_views: beta must be 1 x 3");
  const std::array<const Var*, 3> all{&views.text, &views.pro, &views.hg};
  BoolMatrix enabled(1, 3);
  int count = 0;
  const Var* only = nullptr;
  for (int k = 0; k < 3; ++k) {
    enabled(0, k) = all[static_cast<std::size_t>(k)]->valid();
    if (enabled(0, k)) {
      ++count;
      only = all[static_cast<std::size_t>(k)];
    }
  }
  if (count == 0) throw ConfigError("fuse_views: no view enabled");
  if (count == 1) return *only;

  Var weights = softmax_rows(beta, enabled);
  Var fused;
  for (int k = 0; k < 3; ++k) {
    if (!enabled(0, k)) continue;
    Var term = scale_by_entry(*all[static_cast<std::size_t>(k)], weights, k);
    fused = fused.valid() ? add(fused, term) : term;
  }
  return fused;
}

Var classify(const Var& news, const Var& w, const Var& b) { return softmax_rows(add_row(matmul(news, w), b)); }

Var ce_loss(const Var& probs, std::span<const int> labels, std::span<const Eigen::Index> batch) {
  if (batch.empty()) throw ContractError("ce_loss: empty batch");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> picks;
  picks.reserve(batch.size());
  for (Eigen::Index i : batch) {
    if (i < 0 || static_cast<std::size_t>(i) >= labels.size()) throw ContractError("ce_loss: index out of range");
    picks.emplace_back(i, labels[static_cast<std::size_t>(i)]);
  }
  return scale(mean(log_clamped(gather_entries(probs, picks), 1e-12)), -1.0);
}

Var infonce_loss(const Var& pro, const Var& hg, std::span<const int> labels, std::span<const Eigen::Index> batch,
                 double tau) {
  if (!(tau > 0.0)) throw ContractError("infonce_loss: tau must be positive");
  Tape& tape = *pro.tape();
  const auto b = static_cast<Eigen::Index>(batch.size());
  Matrix positive = Matrix::Zero(b, b);
  Matrix negative = Matrix::Zero(b, b);
  std::vector<Eigen::Index> anchors;
  for (Eigen::Index i = 0; i < b; ++i) {
    const int yi = labels[static_cast<std::size_t>(batch[static_cast<std::size_t>(i)])];
    Eigen::Index npos = 0, nneg = 0;
    for (Eigen::Index k = 0; k < b; ++k) {
      const int yk = labels[static_cast<std::size_t>(batch[static_cast<std::size_t>(k)])];
      if (yk != yi) {
        negative(i, k) = 1.0;
        ++nneg;
      } else if (k != i) {
        positive(i, k) = 1.0;
        ++npos;
      }
    }
    if (npos > 0 && nneg > 0) {
      positive.row(i) /= static_cast<double>(npos);
      anchors.push_back(i);
    }
  }
  if (anchors.empty()) {
    spdlog::warn("contrastive loss: batch of {} has no anchor with both positives and negatives; using 0", b);
    return tape.constant(Matrix::Zero(1, 1));
  }

  Var sims = cosine_matrix(gather_rows(pro, batch), gather_rows(hg, batch));
  Var e = exp(scale(sims, 1.0 / tau));
  Var pos = row_sums(hadamard(e, tape.constant(std::move(positive))));
  Var neg = row_sums(hadamard(e, tape.constant(std::move(negative))));
  Var per_anchor = sub(log_clamped(neg, 1e-300), log_clamped(pos, 1e-300));
  return mean(gather_rows(per_anchor, anchors));
}

Var total_loss(const Var& ce, const Var& cl, double lambda) {
  if (!(lambda >= 0.0)) throw ContractError("total_loss: lambda must be non-negative");
  return add(ce, scale(cl, lambda));
}

ForwardResult model_forward(Tape& tape, const ModelInputs& inputs, const ModelConfig& config, ModelParams& params,
                            Mode mode, Rng& rng) {
  if (inputs.text.cols() != config.d_in) {
    throw ConfigError("model.d_in is " + std::to_string(config.d_in) + " but the data has dimension " +
                      std::to_string(inputs.text.cols()));
  }
  ForwardResult out;
  Var text = tape.constant(inputs.text);

  if (config.use_text) {
    out.views.text = add_row(matmul(text, tape.parameter(params.text_w)), tape.parameter(params.text_b));
  }
  if (config.use_pro) {
    out.views.pro = encode_trees(tape, inputs.prop, params.prop, config.dropout, mode, rng);
  }
  if (config.use_hg) {
    std::optional<DhslModule> dhsl;
    if (config.dhsl) dhsl.emplace(tape, text, params.dhsl, config.p_thd);
    HgnnOutput hg = hgnn_forward(tape, text, tape.constant(inputs.incidence), params.hg,
                                 dhsl ? &*dhsl : nullptr, config.dropout, mode, rng);
    out.views.hg = hg.embeddings;
    out.reconstructed = std::move(hg.reconstructed);
  }

  out.views.news = fuse_views(out.views, tape.parameter(params.fusion));
  out.probs = classify(out.views.news, tape.parameter(params.head_w), tape.parameter(params.head_b));
  return out;
}

LossTerms compute_loss(const ForwardResult& forward, const ModelInputs& inputs, const ModelConfig& config,
                       std::span<const Eigen::Index> batch) {
  LossTerms terms;
  terms.ce = ce_loss(forward.probs, inputs.labels, batch);
  if (config.contrastive && forward.views.pro.valid() && forward.views.hg.valid()) {
    terms.cl = infonce_loss(forward.views.pro, forward.views.hg, inputs.labels, batch, config.tau);
    terms.total = total_loss(terms.ce, terms.cl, config.lambda);
  } else {
    terms.total = terms.ce;
  }
  return terms;
}

}  // namespace hypernews
