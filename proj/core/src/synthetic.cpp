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

#include "hypernews/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hypernews/hyperedges.hpp"

namespace hypernews {

namespace {

std::string padded(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
  return buf;
}

Eigen::RowVectorXd unit_direction(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::RowVectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v / v.norm();
}

Eigen::RowVectorXd noise(Eigen::Index d, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::RowVectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticOptions& opts) {
  if (opts.n_news == 0 || opts.n_news % 2 != 0) throw DataError("synthetic: n_news must be even and positive");
  if (opts.d_in <= 0) throw DataError("synthetic: d_in must be positive");
  if (opts.delta < 0.0) throw DataError("synthetic: delta must be non-negative");
  if (opts.tree_min < 1 || opts.tree_max < opts.tree_min) throw DataError("synthetic: invalid tree size range");
  if (opts.n_users < 2) throw DataError("synthetic: need at least two users");
  if (!(opts.time_window > 0.0)) throw DataError("synthetic: time window must be positive");

  // Stream order: directions, labels, users, then per-news text/time/entities/tree.
  Rng rng(opts.seed);
  const Eigen::Index d = opts.d_in;
  const double noise_sd = 1.0 / std::sqrt(static_cast<double>(d));
  const double half = opts.delta / 2.0;

  const Eigen::RowVectorXd text_dir = unit_direction(d, rng);
  const Eigen::RowVectorXd user_dir = unit_direction(d, rng);

  std::vector<int> labels(opts.n_news);
  for (std::size_t i = 0; i < opts.n_news; ++i) labels[i] = i < opts.n_news / 2 ? 0 : 1;
  std::shuffle(labels.begin(), labels.end(), rng);

  // Users alternate in class leaning.
  std::vector<Eigen::RowVectorXd> user_base(opts.n_users);
  std::vector<std::vector<std::size_t>> users_of_class(2);
  for (std::size_t u = 0; u < opts.n_users; ++u) {
    const int cls = static_cast<int>(u % 2);
    const double sign = cls == 1 ? 1.0 : -1.0;
    user_base[u] = sign * half * user_dir + noise(d, noise_sd, rng);
    users_of_class[static_cast<std::size_t>(cls)].push_back(u);
  }

  // Bursts of publication time; consecutive bursts are 4 windows apart.
  const std::size_t n_bursts = std::max<std::size_t>(2, opts.n_news / 10);
  std::vector<std::vector<std::size_t>> bursts_of_class(2);
  for (std::size_t b = 0; b < n_bursts; ++b) bursts_of_class[b % 2].push_back(b);

  const std::size_t vocab = 10;
  const std::size_t shared_vocab = 5;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> tree_size(opts.tree_min, opts.tree_max);
  std::uniform_int_distribution<std::size_t> any_user(0, opts.n_users - 1);
  std::uniform_int_distribution<std::size_t> any_burst(0, n_bursts - 1);

  SyntheticData out;
  Dataset& data = out.dataset;
  data.d_in = d;
  for (std::size_t i = 0; i < opts.n_news; ++i) {
    const int cls = labels[i];
    const double sign = cls == 1 ? 1.0 : -1.0;
    NewsRecord rec;
    rec.id = padded("n", i);
    rec.label = cls;
    Eigen::RowVectorXd text = sign * half * text_dir + noise(d, noise_sd, rng);
    rec.text_vec.assign(text.data(), text.data() + d);

    const auto& own_bursts = bursts_of_class[static_cast<std::size_t>(cls)];
    std::size_t burst = unit(rng) < 0.85 ? own_bursts[std::uniform_int_distribution<std::size_t>(
                                                0, own_bursts.size() - 1)(rng)]
                                          : any_burst(rng);
    const double time = static_cast<double>(burst) * 4.0 * opts.time_window + 2.0 * opts.time_window * unit(rng);

    std::vector<std::string> entities;
    for (int k = 0; k < 2; ++k) {
      if (unit(rng) < 0.75) {
        const auto e = std::uniform_int_distribution<std::size_t>(0, vocab - 1)(rng);
        entities.push_back("ent_" + std::to_string(cls) + "_" + std::to_string(e));
      } else {
        const auto e = std::uniform_int_distribution<std::size_t>(0, shared_vocab - 1)(rng);
        entities.push_back("ent_shared_" + std::to_string(e));
      }
    }
    std::sort(entities.begin(), entities.end());
    entities.erase(std::unique(entities.begin(), entities.end()), entities.end());

    PropagationTree tree;
    tree.news_id = rec.id;
    const std::size_t size = tree_size(rng);
    tree.node_features.resize(static_cast<Eigen::Index>(size), d);
    tree.node_features.row(0) = text;
    const auto& own_users = users_of_class[static_cast<std::size_t>(cls)];
    for (std::size_t k = 1; k < size; ++k) {
      const std::size_t user = unit(rng) < 0.8
                                   ? own_users[std::uniform_int_distribution<std::size_t>(0, own_users.size() - 1)(rng)]
                                   : any_user(rng);
      const int parent = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, k - 1)(rng));
      tree.edges.emplace_back(parent, static_cast<int>(k));
      tree.node_features.row(static_cast<Eigen::Index>(k)) = user_base[user] + noise(d, 0.1 * noise_sd, rng);
      out.interactions.push_back({padded("u", user), rec.id, time, entities});
    }

    data.news.push_back(std::move(rec));
    data.trees.push_back(std::move(tree));
  }

  data.hyperedges = build_hyperedges(out.interactions, {opts.time_window, 1});
  data.hypergraph = build_incidence(data.news, data.hyperedges);
  return out;
}

}  // namespace hypernews
