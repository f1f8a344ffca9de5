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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hypernews/tensor.hpp"

namespace hypernews {

/// Malformed or inconsistent input data. The message carries file/line context
/// where one exists.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewsRecord {
  std::string id;
  int label = 0;  // 1 = fake
  std::vector<double> text_vec;

  bool operator==(const NewsRecord&) const = default;
};

/// Rooted interaction tree of one news piece. Row 0 of `node_features` is the
/// source news; rows >= 1 are users. Edges are (parent, child).
struct PropagationTree {
  std::string news_id;
  Matrix node_features;
  std::vector<std::pair<int, int>> edges;

  Eigen::Index num_nodes() const { return node_features.rows(); }
  bool operator==(const PropagationTree& o) const {
    return news_id == o.news_id && node_features == o.node_features && edges == o.edges;
  }
};

enum class HyperedgeType { kUser, kTime, kEntity, kLearned };

const char* to_string(HyperedgeType t);
std::optional<HyperedgeType> parse_hyperedge_type(std::string_view s);

/// A named group of news ids, as stored in hyperedges.jsonl.
struct Hyperedge {
  std::string id;
  HyperedgeType type = HyperedgeType::kUser;
  std::vector<std::string> members;

  bool operator==(const Hyperedge&) const = default;
};

/// N x M incidence over news (rows, in dataset order) and hyperedges (columns).
struct Hypergraph {
  Matrix incidence;
  std::vector<HyperedgeType> types;
  std::vector<std::string> ids;

  Eigen::Index num_nodes() const { return incidence.rows(); }
  Eigen::Index num_edges() const { return incidence.cols(); }
};

/// One row of interactions.jsonl.
struct Interaction {
  std::string user;
  std::string news_id;
  double time = 0.0;
  std::vector<std::string> entities;

  bool operator==(const Interaction&) const = default;
};

struct Dataset {
  std::vector<NewsRecord> news;
  std::vector<PropagationTree> trees;  // trees[i] belongs to news[i]
  std::vector<Hyperedge> hyperedges;
  Hypergraph hypergraph;
  Eigen::Index d_in = 0;

  std::size_t size() const { return news.size(); }
  std::vector<int> labels() const;
  /// N x d_in matrix of text vectors in news order.
  Matrix text_matrix() const;
};

struct DatasetPaths {
  std::filesystem::path news;
  std::filesystem::path trees;
  std::filesystem::path hyperedges;

  /// news.jsonl / trees.jsonl / hyperedges.jsonl under `dir`.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

Dataset load_dataset(const DatasetPaths& paths, Eigen::Index d_in);

/// Length of the first record's text_vec in a news file.
Eigen::Index detect_dimension(const std::filesystem::path& news);

/// Writes news.jsonl, trees.jsonl and hyperedges.jsonl (and interactions.jsonl
/// when `interactions` is non-empty) under `dir`.
void save_dataset(const Dataset& data, const std::filesystem::path& dir,
                  std::span<const Interaction> interactions = {});

std::vector<Interaction> load_interactions(const std::filesystem::path& path);

/// Incidence matrix: H(v, e) = 1 iff v in e. Throws DataError for unknown ids or empty hyperedges.
Hypergraph build_incidence(std::span<const NewsRecord> news, std::span<const Hyperedge> hyperedges);

// ---------------------------------------------------------------------------
// Splitting

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultRatios{0.6, 0.2, 0.2};

struct DatasetSplit {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> val;
  std::vector<Eigen::Index> test;
  std::uint64_t seed = 0;
};

/// Set sizes for n items: floors of n * ratio, remainder handed to the largest
/// fractional parts (earlier set on ties).
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Label-stratified seeded split. Throws DataError when fewer than 5 items.
DatasetSplit split_dataset(std::span<const int> labels, const SplitRatios& ratios, Rng& rng);
DatasetSplit split_dataset(std::span<const int> labels, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace hypernews
