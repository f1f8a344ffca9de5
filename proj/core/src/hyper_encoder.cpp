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

#include "hypernews/hyper_encoder.hpp"

#include <string>

namespace hypernews {

HyperEncoderParams HyperEncoderParams::init(Eigen::Index d_in, Eigen::Index d_h, int num_layers, Rng& rng) {
  if (num_layers < 1) throw ContractError("hypergraph encoder needs at least one layer");
  HyperEncoderParams p;
  for (int l = 0; l < num_layers; ++l) {
    const Eigen::Index in = l == 0 ? d_in : d_h;
    const std::string prefix = "hg.l" + std::to_string(l + 1);
    Parameter w1(prefix + ".w1", glorot_uniform(in, d_h, rng));
    Parameter w2(prefix + ".w2", glorot_uniform(d_h, d_h, rng));
    Parameter att(prefix + ".att", glorot_uniform(d_h, d_h, rng));
    p.layers.push_back({std::move(w1), std::move(w2), std::move(att)});
  }
  return p;
}

void HyperEncoderParams::collect(std::vector<Parameter*>& out) {
  for (auto& l : layers) {
    out.push_back(&l.w1);
    out.push_back(&l.w2);
    out.push_back(&l.att);
  }
}

BoolMatrix support(const Matrix& incidence) { return incidence.array() > 0.0; }

Var hyperedge_seed(const Var& nodes, const Var& incidence) { return weighted_column_mean(incidence, nodes); }

Var attention_v2e(const Var& nodes, const Var& edges, const Var& incidence, const Var& w_att) {
  Var scores = leaky_relu(cosine_matrix(matmul(edges, w_att), matmul(nodes, w_att)), kAttentionSlope);
  return softmax_rows(scores, support(incidence.value()).transpose());
}

Var attention_e2v(const Var& nodes, const Var& edges, const Var& incidence, const Var& w_att) {
  Var scores = leaky_relu(cosine_matrix(matmul(nodes, w_att), matmul(edges, w_att)), kAttentionSlope);
  return softmax_rows(scores, support(incidence.value()));
}

Var v2e_layer(const Var& messages, const Var& incidence, const Var& w_att) {
  Var seed = hyperedge_seed(messages, incidence);
  Var att = attention_v2e(messages, seed, incidence, w_att);
  return relu(matmul(hadamard(att, transpose(incidence)), messages));
}

Var e2v_layer(const Var& messages, const Var& edges, const Var& incidence, const Var& w2, const Var& w_att) {
  Var att = attention_e2v(messages, edges, incidence, w_att);
  return relu(matmul(matmul(hadamard(att, incidence), edges), w2));
}

HgnnOutput hgnn_forward(Tape& tape, const Var& x, const Var& incidence, HyperEncoderParams& params,
                        const DhslModule* dhsl, double dropout_rate, Mode mode, Rng& rng) {
  HgnnOutput out;
  Var h = x;
  Var structure = incidence;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    HGLayerParams& lp = params.layers[l];
    Var w1 = tape.parameter(lp.w1);
    Var w2 = tape.parameter(lp.w2);
    Var att = tape.parameter(lp.att);

    Var messages = matmul(h, w1);
    Var edges = v2e_layer(messages, structure, att);
    Var reconstructed = structure;
    Var next_structure = structure;
    if (dhsl != nullptr) {
      // H_ebd depends only on this layer's embeddings, so both calls share it.
      Var h_ebd = dhsl->embedding_structure(messages, edges);
      reconstructed = dhsl->reconstruct(structure, h_ebd);
      next_structure = dhsl->reconstruct(reconstructed, h_ebd);
    }
    h = e2v_layer(messages, edges, reconstructed, w2, att);
    out.reconstructed.push_back(reconstructed);
    structure = next_structure;
    if (l + 1 < params.layers.size()) h = dropout(h, dropout_rate, mode, rng);
  }
  out.embeddings = h;
  out.incidence = structure;
  return out;
}

}  // namespace hypernews
