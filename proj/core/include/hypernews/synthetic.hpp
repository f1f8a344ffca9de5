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
#include <vector>

#include "hypernews/dataset.hpp"

namespace hypernews {

struct SyntheticOptions {
  std::size_t n_news = 200;
  Eigen::Index d_in = 768;
  /// Distance between the two class means of the text vectors.
  double delta = 2.0;
  std::size_t tree_min = 3;
  std::size_t tree_max = 12;
  std::size_t n_users = 100;
  double time_window = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<Interaction> interactions;
};

/// Balanced two-class data with signal in every view.
///
/// Text vectors are +-(delta/2) * mu plus isotropic Gaussian noise of unit
/// expected squared norm (per-coordinate variance 1/d_in). Users lean towards
/// one class; a tree draws most of its users from its root's class, and user
/// features carry the user's leaning. News are published in class-dominated
/// bursts separated by more than `time_window`, and mention entities from a
/// class-specific vocabulary. Hyperedges come from build_hyperedges() over the
/// emitted interaction log.
SyntheticData generate_synthetic(const SyntheticOptions& opts);

}  // namespace hypernews
