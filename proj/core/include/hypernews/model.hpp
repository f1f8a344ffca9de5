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

#include <span>
#include <stdexcept>
#include <vector>

#include "hypernews/dataset.hpp"
#include "hypernews/dhsl.hpp"
#include "hypernews/hyper_encoder.hpp"
#include "hypernews/prop_encoder.hpp"
#include "hypernews/tensor.hpp"

namespace hypernews {

/// Invalid combination of configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  Eigen::Index d_in = 768;
  Eigen::Index d_h = 128;
  int layers_gnn = 2;
  int layers_hgnn = 2;
  double dropout = 0.5;
  double p_thd = 0.1;
  double tau = 0.5;
  double lambda = 0.5;
  bool use_text = true;
  bool use_pro = true;
  bool use_hg = true;
  bool contrastive = true;
  bool dhsl = true;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Every trainable weight of the model. Copyable, so a checkpoint is a copy.
struct ModelParams {
  Parameter text_w;  // d_in x d_h projection of the text view
  Parameter text_b;  // 1 x d_h
  PropEncoderParams prop;
  HyperEncoderParams hg;
  DhslParams dhsl;
  Parameter fusion;  // 1 x 3 view-fusion logits [text, pro, hg]
  Parameter head_w;  // d_h x 2
  Parameter head_b;  // 1 x 2

  /// Draws every parameter in a fixed order regardless of toggles, so runs that
  /// differ only in toggles start from identical weights.
  static ModelParams init(const ModelConfig& config, Rng& rng);

  /// Stable order: text, prop, hg, dhsl, fusion, head.
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  /// Parameters that belong to a single view (for gradient-isolation checks).
  std::vector<Parameter*> text_view();
  std::vector<Parameter*> prop_view();
  std::vector<Parameter*> hg_view();
};

/// Dataset tensors the forward pass needs, prepared once.
struct ModelInputs {
  Matrix text;       // N x d_in
  Matrix incidence;  // N x M
  PropGraph prop;
  std::vector<int> labels;

  static ModelInputs from(const Dataset& data);
  Eigen::Index size() const { return text.rows(); }
};

/// Per-view embeddings; a disabled view holds an invalid Var.
struct ViewEmbeddings {
  Var text;
  Var pro;
  Var hg;
  Var news;
};

struct ForwardResult {
  Var probs;
  ViewEmbeddings views;
  std::vector<Var> reconstructed;  // H_re per hypergraph layer (empty if the view is off)
};

/// Attention fusion: softmax over the enabled views' logits in `beta` (1 x 3),
/// then the weighted sum. A single enabled view is returned unchanged.
Var fuse_views(const ViewEmbeddings& views, const Var& beta);

/// softmax(x W + b) per row; column 1 is the probability of "fake".
Var classify(const Var& news, const Var& w, const Var& b);

/// Mean negative log-probability of the true class over `batch` (log clamped at 1e-12).
Var ce_loss(const Var& probs, std::span<const int> labels, std::span<const Eigen::Index> batch);

/// Cross-view supervised contrastive loss between propagation and hypergraph
/// embeddings over `batch`. For anchor i, positives K(i) are other batch
/// members with the same label and negatives T(i) those with a different label:
///   -log[ (1/|K|) sum_K exp(cos(p_i, h_k)/tau) / sum_T exp(cos(p_i, h_t)/tau) ]
/// averaged over anchors with both sets non-empty. Returns a constant 0 if none.
Var infonce_loss(const Var& pro, const Var& hg, std::span<const int> labels, std::span<const Eigen::Index> batch,
                 double tau);

/// ce + lambda * cl
Var total_loss(const Var& ce, const Var& cl, double lambda);

ForwardResult model_forward(Tape& tape, const ModelInputs& inputs, const ModelConfig& config, ModelParams& params,
                            Mode mode, Rng& rng);

struct LossTerms {
  Var total;
  Var ce;
  Var cl;  // invalid when the contrastive term is off
};

/// Losses of `forward` restricted to `batch`. The contrastive term is computed
/// only when it is enabled and both the propagation and hypergraph views are on.
LossTerms compute_loss(const ForwardResult& forward, const ModelInputs& inputs, const ModelConfig& config,
                       std::span<const Eigen::Index> batch);

}  // namespace hypernews
