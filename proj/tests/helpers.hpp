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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hypernews/model.hpp"
#include "oracle.hpp"

namespace hypernews::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

/// Random binary incidence with every column and every row non-empty.
inline Matrix random_incidence(Eigen::Index n, Eigen::Index m, Rng& rng, double density = 0.5) {
  std::bernoulli_distribution member(density);
  std::uniform_int_distribution<Eigen::Index> pick_row(0, n - 1);
  std::uniform_int_distribution<Eigen::Index> pick_col(0, m - 1);
  Matrix h = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) h(i, j) = member(rng) ? 1.0 : 0.0;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (h.col(j).sum() == 0.0) h(pick_row(rng), j) = 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (h.row(i).sum() == 0.0) h(i, pick_col(rng)) = 1.0;
  }
  return h;
}

/// Random rooted tree: node v > 0 gets a parent drawn from 0..v-1.
inline PropagationTree random_tree(const std::string& id, Eigen::Index nodes, Eigen::Index d, Rng& rng) {
  PropagationTree t;
  t.news_id = id;
  t.node_features = random_matrix(nodes, d, rng);
  for (Eigen::Index v = 1; v < nodes; ++v) {
    std::uniform_int_distribution<int> parent(0, static_cast<int>(v) - 1);
    t.edges.emplace_back(parent(rng), static_cast<int>(v));
  }
  return t;
}

struct Instance {
  ModelInputs inputs;
  std::vector<PropagationTree> trees;
};

/// n news with alternating labels, m hyperedges, trees of 1..5 nodes.
inline Instance random_instance(std::uint64_t seed, Eigen::Index n = 8, Eigen::Index m = 3, Eigen::Index d_in = 8) {
  Rng rng(seed);
  Instance inst;
  inst.inputs.text = random_matrix(n, d_in, rng);
  inst.inputs.incidence = random_incidence(n, m, rng);
  std::uniform_int_distribution<Eigen::Index> size(1, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    inst.trees.push_back(random_tree("n" + std::to_string(i), size(rng), d_in, rng));
    inst.inputs.labels.push_back(static_cast<int>(i % 2));
  }
  inst.inputs.prop = PropGraph::build(inst.trees);
  return inst;
}

inline ModelConfig small_config(Eigen::Index d_in = 8, Eigen::Index d_h = 6) {
  ModelConfig c;
  c.d_in = d_in;
  c.d_h = d_h;
  c.dropout = 0.0;
  c.p_thd = 0.5;
  return c;
}

inline std::vector<Eigen::Index> all_indices(Eigen::Index n) {
  std::vector<Eigen::Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// ---------------------------------------------------------------------------
// Finite differences

struct GradCheck {
  double max_rel = 0.0;
  double max_abs = 0.0;
  std::size_t coordinates = 0;
  std::string worst;
};

/// Relative error |a - n| / max(|a|, |n|, 1e-3).
inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

/// Compares reverse-mode gradients of the scalar built by `loss` with central
/// differences (step h) over every coordinate of every parameter.
inline GradCheck check_gradients(const std::vector<Parameter*>& params, const std::function<Var(Tape&)>& loss,
                                 double h = 1e-5) {
  Tape tape;
  Var out = loss(tape);
  const Gradients grads = tape.backward(out, params);
  auto value_of = [&] {
    Tape t(Tape::GradMode::kInference);
    return loss(t).value()(0, 0);
  };
  GradCheck result;
  for (Parameter* p : params) {
    const Matrix& g = grads.at(*p);
    for (Eigen::Index i = 0; i < p->rows(); ++i) {
      for (Eigen::Index j = 0; j < p->cols(); ++j) {
        const double saved = p->value()(i, j);
        p->value()(i, j) = saved + h;
        const double up = value_of();
        p->value()(i, j) = saved - h;
        const double down = value_of();
        p->value()(i, j) = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double rel = relative_error(g(i, j), numeric);
        result.max_abs = std::max(result.max_abs, std::abs(g(i, j) - numeric));
        if (rel > result.max_rel) {
          result.max_rel = rel;
          result.worst = p->name() + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        }
        ++result.coordinates;
      }
    }
  }
  return result;
}

/// sum(op ⊙ R) for a fixed random R, so every output entry gets a distinct upstream gradient.
inline Var weighted_sum(const Var& v, std::uint64_t seed) {
  Rng rng(seed);
  return sum(hadamard(v, v.tape()->constant(random_matrix(v.rows(), v.cols(), rng))));
}

// ---------------------------------------------------------------------------
// Oracle adapters

inline std::vector<oracle::HgLayer> oracle_layers(const HyperEncoderParams& p) {
  std::vector<oracle::HgLayer> out;
  for (const auto& l : p.layers) {
    out.push_back({oracle::to_grid(l.w1.value()), oracle::to_grid(l.w2.value()), oracle::to_grid(l.att.value())});
  }
  return out;
}

inline oracle::DhslWeights oracle_dhsl(const DhslParams& p, double p_thd) {
  return {oracle::to_grid(p.w_ebd.value()).front(), oracle::to_grid(p.w_text.value()).front(),
          oracle::to_grid(p.alpha.value()).front(), oracle::to_grid(p.text_proj.value()), p_thd};
}

inline std::vector<oracle::SageLayer> oracle_sage(const PropEncoderParams& p) {
  std::vector<oracle::SageLayer> out;
  for (const auto& l : p.layers) out.push_back({oracle::to_grid(l.self.value()), oracle::to_grid(l.neighbor.value())});
  return out;
}

inline oracle::Tree oracle_tree(const PropagationTree& t) { return {oracle::to_grid(t.node_features), t.edges}; }

struct OracleViews {
  oracle::Grid text, pro, hg, news, probs;
};

/// Straight-line eval-mode recomputation of the whole pipeline.
inline OracleViews oracle_forward(const Instance& inst, const ModelParams& params, const ModelConfig& config) {
  using namespace oracle;
  OracleViews v;
  const Grid text = to_grid(inst.inputs.text);
  const std::size_t n = text.size();
  std::vector<const Grid*> enabled;
  std::vector<double> logits;
  const Row beta = to_grid(params.fusion.value()).front();

  if (config.use_text) {
    v.text = matmul(text, to_grid(params.text_w.value()));
    const Row b = to_grid(params.text_b.value()).front();
    for (Row& r : v.text) {
      for (std::size_t d = 0; d < r.size(); ++d) r[d] += b[d];
    }
    enabled.push_back(&v.text);
    logits.push_back(beta[0]);
  }
  if (config.use_pro) {
    const auto layers = oracle_sage(params.prop);
    for (const PropagationTree& t : inst.trees) v.pro.push_back(encode_tree(oracle_tree(t), layers));
    enabled.push_back(&v.pro);
    logits.push_back(beta[1]);
  }
  if (config.use_hg) {
    const DhslWeights d = oracle_dhsl(params.dhsl, config.p_thd);
    v.hg = hypergraph_forward(text, to_grid(inst.inputs.incidence), oracle_layers(params.hg),
                              config.dhsl ? &d : nullptr, text)
               .embeddings;
    enabled.push_back(&v.hg);
    logits.push_back(beta[2]);
  }

  if (enabled.size() == 1) {
    v.news = *enabled.front();
  } else {
    const Row w = softmax(logits);
    v.news = zeros(n, enabled.front()->front().size());
    for (std::size_t k = 0; k < enabled.size(); ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < v.news[i].size(); ++d) v.news[i][d] += w[k] * (*enabled[k])[i][d];
      }
    }
  }
  const Grid logit = matmul(v.news, to_grid(params.head_w.value()));
  const Row hb = to_grid(params.head_b.value()).front();
  for (const Row& r : logit) {
    Row z(r.size());
    for (std::size_t c = 0; c < r.size(); ++c) z[c] = r[c] + hb[c];
    v.probs.push_back(softmax(z));
  }
  return v;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return a.rows() * a.cols() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace hypernews::testing
