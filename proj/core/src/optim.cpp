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

#include "hypernews/optim.hpp"

#include <cmath>

namespace hypernews {

OptimState OptimState::zeros_like(std::span<Parameter* const> params) {
  OptimState s;
  s.first_moment.reserve(params.size());
  s.second_moment.reserve(params.size());
  for (const Parameter* p : params) {
    s.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    s.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
  return s;
}

void adam_step(std::span<Parameter* const> params, std::span<const Matrix> grads, OptimState& state,
               const AdamOptions& opts) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw ContractError("adam_step: parameter, gradient and state counts differ");
  }
  if (!(opts.lr >= 0.0)) throw ContractError("adam_step: learning rate must be non-negative");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = grads[i];
    if (g.rows() != params[i]->rows() || g.cols() != params[i]->cols() ||
        state.first_moment[i].rows() != g.rows() || state.first_moment[i].cols() != g.cols()) {
      throw ContractError("adam_step: shape mismatch for parameter '" + params[i]->name() + "'");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(opts.beta1, t);
  const double c2 = 1.0 - std::pow(opts.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = grads[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = opts.beta1 * m + (1.0 - opts.beta1) * g;
    v = opts.beta2 * v + (1.0 - opts.beta2) * g.cwiseProduct(g);
    Matrix& p = params[i]->value();
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double mhat = m.data()[k] / c1;
      const double vhat = v.data()[k] / c2;
      p.data()[k] -= opts.lr * mhat / (std::sqrt(vhat) + opts.eps);
    }
  }
}

Adam::Adam(std::vector<Parameter*> params, AdamOptions opts)
    : params_(std::move(params)), opts_(opts), state_(OptimState::zeros_like(params_)) {}

void Adam::step(const Gradients& grads) {
  std::vector<Matrix> ordered;
  ordered.reserve(params_.size());
  for (const Parameter* p : params_) ordered.push_back(grads.at(*p));
  adam_step(params_, ordered, state_, opts_);
}

}  // namespace hypernews
