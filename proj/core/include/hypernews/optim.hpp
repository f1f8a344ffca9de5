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

#include <cstdint>
#include <span>
#include <vector>

#include "hypernews/tensor.hpp"

namespace hypernews {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment accumulators, one pair per parameter, plus the step count.
struct OptimState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;

  static OptimState zeros_like(std::span<Parameter* const> params);
};

/// One bias-corrected Adam update, in place. `grads[i]` belongs to `params[i]`.
void adam_step(std::span<Parameter* const> params, std::span<const Matrix> grads, OptimState& state,
               const AdamOptions& opts);

/// Holds the parameter list and its moment state across steps.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamOptions opts);

  void step(const Gradients& grads);

  const OptimState& state() const { return state_; }
  const AdamOptions& options() const { return opts_; }

 private:
  std::vector<Parameter*> params_;
  AdamOptions opts_;
  OptimState state_;
};

}  // namespace hypernews
