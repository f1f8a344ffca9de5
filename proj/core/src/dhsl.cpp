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

#include "hypernews/dhsl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hypernews {

DhslParams DhslParams::init(Eigen::Index d_in, Eigen::Index d_h, Rng& rng) {
  return DhslParams{
      Parameter("dhsl.w_ebd", Matrix::Ones(1, d_h)),
      Parameter("dhsl.w_text", Matrix::Ones(1, d_h)),
      Parameter("dhsl.alpha", Matrix::Zero(1, 3)),
      Parameter("dhsl.text_proj", glorot_uniform(d_in, d_h, rng)),
  };
}

void DhslParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&w_ebd);
  out.push_back(&w_text);
  out.push_back(&alpha);
  out.push_back(&text_proj);
}

Var similarity_matrix(const Var& nodes, const Var& edges, const Var& w) {
  return cosine_matrix(mul_row(nodes, w), mul_row(edges, w));
}

Eigen::Index topk_count(double p_thd, Eigen::Index n) {
  if (p_thd < 0.0 || p_thd > 1.0) throw ContractError("p_thd must lie in [0, 1]");
  const double k = std::ceil(p_thd * static_cast<double>(n) - 1e-9);
  return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(k), 0, n);
}

BoolMatrix topk_mask(const Matrix& s, double p_thd, std::size_t* boundary_ties) {
  const Eigen::Index n = s.rows();
  const Eigen::Index k = topk_count(p_thd, n);
  BoolMatrix mask = BoolMatrix::Constant(n, s.cols(), false);
  if (k == 0) return mask;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  const Matrix key = (s.array() / kRankResolution).round().matrix();
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return key(a, j) > key(b, j); });
    for (Eigen::Index r = 0; r < k; ++r) mask(order[static_cast<std::size_t>(r)], j) = true;
    if (boundary_ties != nullptr && k < n &&
        key(order[static_cast<std::size_t>(k - 1)], j) == key(order[static_cast<std::size_t>(k)], j)) {
      ++*boundary_ties;
    }
  }
  return mask;
}

Var topk_structure(const Var& s, double p_thd, std::size_t* boundary_ties) {
  Tape& tape = *s.tape();
  const BoolMatrix mask = topk_mask(s.value(), p_thd, boundary_ties);
  if (!mask.any()) return tape.constant(Matrix::Zero(s.rows(), s.cols()));
  Var selector = tape.constant(mask.cast<double>().matrix());
  return hadamard(relu(s), selector);
}

Var text_structure(const Var& projected_text, const Var& incidence, const Var& w_text, double p_thd,
                   std::size_t* boundary_ties) {
  if (topk_count(p_thd, incidence.rows()) == 0) {
    return projected_text.tape()->constant(Matrix::Zero(incidence.rows(), incidence.cols()));
  }
  Var anchors = weighted_column_mean(incidence, projected_text);
  return topk_structure(similarity_matrix(projected_text, anchors, w_text), p_thd, boundary_ties);
}

Var fuse_structures(const Var& h, const Var& h_ebd, const Var& h_text, const Var& alpha) {
  if (alpha.rows() != 1 || alpha.cols() != 3) throw ContractError("fuse_structures: alpha must be 1 x 3");
  if (h_ebd.value().isZero(0.0) && h_text.value().isZero(0.0)) return h;
  Var weights = softmax_rows(alpha);
  Var fused = add(add(scale_by_entry(h, weights, 0), scale_by_entry(h_ebd, weights, 1)),
                  scale_by_entry(h_text, weights, 2));
  return clamp(fused, 0.0, 1.0);
}

DhslModule::DhslModule(Tape& tape, const Var& text, DhslParams& params, double p_thd)
    : p_thd_(p_thd),
      w_ebd_(tape.parameter(params.w_ebd)),
      w_text_(tape.parameter(params.w_text)),
      alpha_(tape.parameter(params.alpha)) {
  (void)topk_count(p_thd, 1);  // validates the range
  if (topk_count(p_thd, text.rows()) > 0) projected_text_ = matmul(text, tape.parameter(params.text_proj));
}

Var DhslModule::embedding_structure(const Var& nodes, const Var& edges) const {
  if (topk_count(p_thd_, nodes.rows()) == 0) {
    return nodes.tape()->constant(Matrix::Zero(nodes.rows(), edges.rows()));
  }
  return topk_structure(similarity_matrix(nodes, edges, w_ebd_), p_thd_, &boundary_ties_);
}

Var DhslModule::reconstruct(const Var& h_current, const Var& h_ebd) const {
  Var h_text = projected_text_.valid()
                   ? text_structure(projected_text_, h_current, w_text_, p_thd_, &boundary_ties_)
                   : h_current.tape()->constant(Matrix::Zero(h_current.rows(), h_current.cols()));
  return fuse_structures(h_current, h_ebd, h_text, alpha_);
}

}  // namespace hypernews
