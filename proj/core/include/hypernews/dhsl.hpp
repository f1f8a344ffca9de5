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

#include "hypernews/tensor.hpp"

namespace hypernews {

/// Trainable pieces of dynamic structure learning.
struct DhslParams {
  Parameter w_ebd;      // 1 x d_h similarity weights for node/hyperedge embeddings
  Parameter w_text;     // 1 x d_h similarity weights for the text-anchored structure
  Parameter alpha;      // 1 x 3 fusion logits over [H, H_ebd, H_text]
  Parameter text_proj;  // d_in x d_h

  /// Weight vectors start at ones, fusion logits at zero.
  static DhslParams init(Eigen::Index d_in, Eigen::Index d_h, Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

/// s_ij = cos(w .* x_i, w .* u_j) for node rows x (N x d) and hyperedge rows u (M x d).
Var similarity_matrix(const Var& nodes, const Var& edges, const Var& w);

/// ceil(p_thd * n - 1e-9); 0.3 * 10 yields 3.
Eigen::Index topk_count(double p_thd, Eigen::Index n);

/// Entries are ranked on a grid of this spacing, so values that differ only by
/// rounding noise count as ties.
inline constexpr double kRankResolution = 1e-12;

/// Boolean selection of the k = topk_count(p_thd, N) largest entries of every
/// column of `s` (ties go to the lower row index). If `boundary_ties` is given,
/// it is incremented once per column whose k-th and (k+1)-th entries tie.
BoolMatrix topk_mask(const Matrix& s, double p_thd, std::size_t* boundary_ties = nullptr);

/// Keeps the top-k entries of every column with value max(s_ij, 0); the rest are 0.
/// Selection is constant with respect to gradients; values stay differentiable.
Var topk_structure(const Var& s, double p_thd, std::size_t* boundary_ties = nullptr);

/// Text-anchored structure: hyperedge anchors are incidence-weighted means of
/// the projected text rows under `incidence`, then similarity + top-k with w_text.
Var text_structure(const Var& projected_text, const Var& incidence, const Var& w_text, double p_thd,
                   std::size_t* boundary_ties = nullptr);

/// Graph-level attention over [H, H_ebd, H_text]. Returns `h` itself when both
/// generated structures are all zero; otherwise the softmax(alpha)-weighted sum
/// clamped to [0, 1].
Var fuse_structures(const Var& h, const Var& h_ebd, const Var& h_text, const Var& alpha);

/// DHSL bound to one tape: shares the projected text across calls of a pass.
class DhslModule {
 public:
  DhslModule(Tape& tape, const Var& text, DhslParams& params, double p_thd);

  /// H_ebd from node and hyperedge embeddings of the current layer.
  Var embedding_structure(const Var& nodes, const Var& edges) const;
  /// H_re = fuse(H_current, H_ebd, H_text(H_current)).
  Var reconstruct(const Var& h_current, const Var& h_ebd) const;

  double p_thd() const { return p_thd_; }
  /// Columns so far whose selection was decided by the index tie rule.
  std::size_t boundary_ties() const { return boundary_ties_; }

 private:
  double p_thd_;
  mutable std::size_t boundary_ties_ = 0;
  Var w_ebd_;
  Var w_text_;
  Var alpha_;
  Var projected_text_;
};

}  // namespace hypernews
