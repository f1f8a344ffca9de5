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

#include <vector>

#include "hypernews/dhsl.hpp"
#include "hypernews/tensor.hpp"

namespace hypernews {

/// One attention hypergraph convolution layer.
///
/// Node rows are first mapped into the layer's output space, P = X W_1, and
/// both attention directions compare rows after the shared transform W there:
/// node-to-hyperedge scores use an incidence-weighted mean of P as the
/// hyperedge estimate, hyperedge-to-node scores use the layer's U.
struct HGLayerParams {
  Parameter w1;   // in x out, node -> hyperedge messages
  Parameter w2;   // out x out, hyperedge -> node messages
  Parameter att;  // out x out, shared attention transform
};

struct HyperEncoderParams {
  std::vector<HGLayerParams> layers;

  static HyperEncoderParams init(Eigen::Index d_in, Eigen::Index d_h, int num_layers, Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

inline constexpr double kAttentionSlope = 0.2;

/// Support of an incidence structure: entries > 0.
BoolMatrix support(const Matrix& incidence);

/// u_j = sum_v H(v,j) x_v / sum_v H(v,j); zero for empty hyperedges.
Var hyperedge_seed(const Var& nodes, const Var& incidence);

/// M x N: softmax over members i of hyperedge j of leaky(cos(u_j W, x_i W)).
Var attention_v2e(const Var& nodes, const Var& edges, const Var& incidence, const Var& w_att);

/// N x M: softmax over hyperedges j containing node i of leaky(cos(x_i W, u_j W)).
Var attention_e2v(const Var& nodes, const Var& edges, const Var& incidence, const Var& w_att);

/// Node-to-hyperedge stage. `messages` is X W_1. Returns
/// relu((Att_v2e .* H^T) messages), with Att_v2e built from hyperedge_seed(messages, H).
Var v2e_layer(const Var& messages, const Var& incidence, const Var& w_att);

/// Hyperedge-to-node stage: relu((Att_e2v .* H) U W_2).
Var e2v_layer(const Var& messages, const Var& edges, const Var& incidence, const Var& w2, const Var& w_att);

struct HgnnOutput {
  Var embeddings;               // X_hg
  Var incidence;                // structure handed to the next layer after the last one
  std::vector<Var> reconstructed;  // H_re used by each layer's hyperedge-to-node stage
};

/// Stacked layers with structure learning interleaved. Per layer:
///   U = v2e(X, H);  H_re = DHSL(X, U, H);  X' = e2v(U, H_re);  H' = DHSL(X, U, H_re)
/// `dhsl` may be null, in which case H_re = H' = H. Dropout is applied between layers.
HgnnOutput hgnn_forward(Tape& tape, const Var& x, const Var& incidence, HyperEncoderParams& params,
                        const DhslModule* dhsl, double dropout_rate, Mode mode, Rng& rng);

}  // namespace hypernews
