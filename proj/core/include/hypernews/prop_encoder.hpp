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

#include <memory>
#include <span>
#include <vector>

#include "hypernews/dataset.hpp"
#include "hypernews/tensor.hpp"

namespace hypernews {

/// Self and neighbor transforms of one mean-aggregation layer.
struct SageLayerParams {
  Parameter self;
  Parameter neighbor;
};

struct PropEncoderParams {
  std::vector<SageLayerParams> layers;

  /// Layer 0 maps d_in -> d_h, later layers d_h -> d_h.
  static PropEncoderParams init(Eigen::Index d_in, Eigen::Index d_h, int num_layers, Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

/// All trees of a dataset as one disjoint-union graph.
struct PropGraph {
  Matrix features;                              // stacked node features
  std::shared_ptr<const SparseMatrix> mean_adj;  // row-normalized symmetrized adjacency
  Matrix aggregated_features;                   // mean_adj * features, reused by layer 0
  std::vector<Eigen::Index> roots;              // row of each tree's node 0

  static PropGraph build(std::span<const PropagationTree> trees);
};

/// Row-normalized adjacency of a single tree with edges treated as undirected.
SparseMatrix mean_adjacency(Eigen::Index num_nodes, std::span<const std::pair<int, int>> edges);

/// relu(x W_self + (A x) W_nbr) where A averages over neighbors; isolated
/// nodes get a zero aggregate. `aggregated` is A x.
Var sage_layer(const Var& x, const Var& aggregated, const Var& w_self, const Var& w_neighbor);
Var sage_layer(const Var& x, const std::shared_ptr<const SparseMatrix>& mean_adj, const Var& w_self,
               const Var& w_neighbor);

/// Encodes every tree and returns the root embeddings (one row per tree).
/// Dropout sits between layers and is active only in train mode.
Var encode_trees(Tape& tape, const PropGraph& graph, PropEncoderParams& params, double dropout_rate, Mode mode,
                 Rng& rng);

}  // namespace hypernews
