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

#include "hypernews/prop_encoder.hpp"

#include <string>

namespace hypernews {

PropEncoderParams PropEncoderParams::init(Eigen::Index d_in, Eigen::Index d_h, int num_layers, Rng& rng) {
  if (num_layers < 1) throw ContractError("propagation encoder needs at least one layer");
  PropEncoderParams p;
  for (int l = 0; l < num_layers; ++l) {
    const Eigen::Index in = l == 0 ? d_in : d_h;
    const std::string prefix = "prop.l" + std::to_string(l + 1);
    Parameter self(prefix + ".self", glorot_uniform(in, d_h, rng));
    Parameter nbr(prefix + ".neighbor", glorot_uniform(in, d_h, rng));
    p.layers.push_back({std::move(self), std::move(nbr)});
  }
  return p;
}

void PropEncoderParams::collect(std::vector<Parameter*>& out) {
  for (auto& l : layers) {
    out.push_back(&l.self);
    out.push_back(&l.neighbor);
  }
}

SparseMatrix mean_adjacency(Eigen::Index num_nodes, std::span<const std::pair<int, int>> edges) {
  std::vector<int> degree(static_cast<std::size_t>(num_nodes), 0);
  for (auto [p, c] : edges) {
    ++degree[static_cast<std::size_t>(p)];
    ++degree[static_cast<std::size_t>(c)];
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 2);
  for (auto [p, c] : edges) {
    trips.emplace_back(p, c, 1.0 / degree[static_cast<std::size_t>(p)]);
    trips.emplace_back(c, p, 1.0 / degree[static_cast<std::size_t>(c)]);
  }
  SparseMatrix a(num_nodes, num_nodes);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

PropGraph PropGraph::build(std::span<const PropagationTree> trees) {
  PropGraph g;
  Eigen::Index total = 0;
  Eigen::Index dim = trees.empty() ? 0 : trees.front().node_features.cols();
  for (const auto& t : trees) {
    if (t.node_features.cols() != dim) throw ContractError("PropGraph: trees disagree on feature dimension");
    total += t.num_nodes();
  }
  g.features.resize(total, dim);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::Index offset = 0;
  for (const auto& t : trees) {
    g.features.middleRows(offset, t.num_nodes()) = t.node_features;
    g.roots.push_back(offset);
    const SparseMatrix local = mean_adjacency(t.num_nodes(), t.edges);
    for (Eigen::Index r = 0; r < local.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(local, r); it; ++it) {
        trips.emplace_back(offset + it.row(), offset + it.col(), it.value());
      }
    }
    offset += t.num_nodes();
  }
  auto adj = std::make_shared<SparseMatrix>(total, total);
  adj->setFromTriplets(trips.begin(), trips.end());
  g.aggregated_features = (*adj) * g.features;
  g.mean_adj = std::move(adj);
  return g;
}

Var sage_layer(const Var& x, const Var& aggregated, const Var& w_self, const Var& w_neighbor) {
  return relu(add(matmul(x, w_self), matmul(aggregated, w_neighbor)));
}

Var sage_layer(const Var& x, const std::shared_ptr<const SparseMatrix>& mean_adj, const Var& w_self,
               const Var& w_neighbor) {
  return sage_layer(x, spmm(mean_adj, x), w_self, w_neighbor);
}

Var encode_trees(Tape& tape, const PropGraph& graph, PropEncoderParams& params, double dropout_rate, Mode mode,
                 Rng& rng) {
  Var h = tape.constant(graph.features);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Var w_self = tape.parameter(params.layers[l].self);
    Var w_nbr = tape.parameter(params.layers[l].neighbor);
    if (l == 0) {
      h = sage_layer(h, tape.constant(graph.aggregated_features), w_self, w_nbr);
    } else {
      h = sage_layer(h, graph.mean_adj, w_self, w_nbr);
    }
    if (l + 1 < params.layers.size()) h = dropout(h, dropout_rate, mode, rng);
  }
  return gather_rows(h, graph.roots);
}

}  // namespace hypernews
