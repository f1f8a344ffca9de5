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

#include "hypernews/hyperedges.hpp"

#include <algorithm>
#include <limits>

namespace hypernews {

namespace {

/// Visits every k-subset of `items` (already sorted) in lexicographic order.
template <typename Fn>
void for_each_subset(const std::vector<std::string>& items, std::size_t k, Fn&& fn) {
  if (k == 0 || k > items.size()) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::string> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
    fn(subset);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::vector<MemberSet> build_user_hyperedges(std::span<const std::pair<std::string, std::string>> user_news) {
  std::map<std::string, std::set<std::string>> by_user;
  for (const auto& [user, news] : user_news) by_user[user].insert(news);
  std::vector<MemberSet> out;
  for (const auto& [user, news] : by_user) {
    if (news.size() >= 2) out.emplace_back(news.begin(), news.end());
  }
  return out;
}

std::vector<MemberSet> build_time_hyperedges(const std::map<std::string, double>& times, double window) {
  if (!(window > 0.0)) throw ContractError("build_time_hyperedges: window must be positive");
  std::vector<std::pair<double, std::string>> order;
  order.reserve(times.size());
  for (const auto& [id, t] : times) order.emplace_back(t, id);
  std::sort(order.begin(), order.end());

  std::vector<MemberSet> out;
  MemberSet run;
  double last = -std::numeric_limits<double>::infinity();
  auto flush = [&] {
    if (run.size() >= 2) {
      std::sort(run.begin(), run.end());
      out.push_back(run);
    }
    run.clear();
  };
  for (const auto& [t, id] : order) {
    if (!run.empty() && t - last > window) flush();
    run.push_back(id);
    last = t;
  }
  flush();
  return out;
}

std::vector<MemberSet> build_entity_hyperedges(const std::map<std::string, std::set<std::string>>& entities,
                                               std::size_t min_shared) {
  if (min_shared < 1) throw ContractError("build_entity_hyperedges: min_shared must be >= 1");
  std::map<std::vector<std::string>, std::set<std::string>> index;
  for (const auto& [news, ents] : entities) {
    std::vector<std::string> sorted(ents.begin(), ents.end());
    for_each_subset(sorted, min_shared, [&](const std::vector<std::string>& key) { index[key].insert(news); });
  }
  std::vector<MemberSet> out;
  std::set<MemberSet> seen;
  for (const auto& [key, news] : index) {
    if (news.size() < 2) continue;
    MemberSet members(news.begin(), news.end());
    if (seen.insert(members).second) out.push_back(std::move(members));
  }
  return out;
}

std::vector<Hyperedge> build_hyperedges(std::span<const Interaction> log, const HyperedgeBuildOptions& opts) {
  std::vector<std::pair<std::string, std::string>> user_news;
  std::map<std::string, double> times;
  std::map<std::string, std::set<std::string>> entities;
  for (const auto& r : log) {
    user_news.emplace_back(r.user, r.news_id);
    auto [it, inserted] = times.emplace(r.news_id, r.time);
    if (!inserted) it->second = std::min(it->second, r.time);
    auto& ents = entities[r.news_id];
    ents.insert(r.entities.begin(), r.entities.end());
  }

  std::vector<Hyperedge> out;
  auto append = [&](const std::vector<MemberSet>& sets, HyperedgeType type) {
    std::size_t n = 0;
    for (const auto& members : sets) {
      out.push_back({std::string(to_string(type)) + ":" + std::to_string(n++), type, members});
    }
  };
  append(build_user_hyperedges(user_news), HyperedgeType::kUser);
  append(build_time_hyperedges(times, opts.time_window), HyperedgeType::kTime);
  append(build_entity_hyperedges(entities, opts.min_shared_entities), HyperedgeType::kEntity);
  return out;
}

}  // namespace hypernews
