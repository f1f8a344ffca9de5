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

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypernews/dataset.hpp"

namespace hypernews {

/// Sorted, de-duplicated member ids of one hyperedge.
using MemberSet = std::vector<std::string>;

/// One hyperedge per user who touched at least two distinct news, ordered by user id.
std::vector<MemberSet> build_user_hyperedges(std::span<const std::pair<std::string, std::string>> user_news);

/// Sorts news by timestamp and groups maximal runs whose consecutive gaps are
/// <= window; runs with fewer than two news are dropped.
std::vector<MemberSet> build_time_hyperedges(const std::map<std::string, double>& times, double window);

/// Inverted index over entities. With min_shared == 1 each entity shared by at
/// least two news yields a hyperedge; with min_shared == k every k-subset of an
/// entity set acts as the key. Identical member sets are emitted once.
std::vector<MemberSet> build_entity_hyperedges(const std::map<std::string, std::set<std::string>>& entities,
                                               std::size_t min_shared);

struct HyperedgeBuildOptions {
  double time_window = 1.0;
  std::size_t min_shared_entities = 1;
};

/// Runs all three constructors over an interaction log. A news item's time is
/// its earliest interaction; its entities are the union over its interactions.
/// Hyperedge ids are "user:<n>", "time:<n>", "entity:<n>".
std::vector<Hyperedge> build_hyperedges(std::span<const Interaction> log, const HyperedgeBuildOptions& opts);

}  // namespace hypernews
