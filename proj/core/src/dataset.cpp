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

#include "hypernews/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace hypernews {

using nlohmann::json;

namespace {

std::string where(const std::filesystem::path& file, std::size_t line) {
  return file.filename().string() + ":" + std::to_string(line) + ": ";
}

/// Calls `fn(json, line_number)` for every non-blank line.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& file, Fn&& fn) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where(file, lineno) + "invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(where(file, lineno) + "expected a JSON object");
    try {
      fn(j, lineno);
    } catch (const json::exception& e) {
      throw DataError(where(file, lineno) + "schema error: " + e.what());
    }
  }
}

const json& require_key(const json& j, const char* key, const std::filesystem::path& file, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(where(file, line) + "missing key \"" + key + "\"");
  return *it;
}

std::vector<double> read_vector(const json& j) {
  if (!j.is_array()) throw DataError("expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const json& x : j) {
    if (!x.is_number()) throw DataError("expected a number");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw DataError("non-finite feature value");
    v.push_back(d);
  }
  return v;
}

void write_lines(const std::filesystem::path& file, const std::vector<json>& rows) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  for (const json& r : rows) out << r.dump() << '\n';
}

/// Throws unless `edges` form a tree over n nodes rooted at 0.
void validate_tree(Eigen::Index n, const std::vector<std::pair<int, int>>& edges, const std::string& ctx) {
  if (static_cast<Eigen::Index>(edges.size()) != n - 1) {
    throw DataError(ctx + "tree with " + std::to_string(n) + " nodes must have " + std::to_string(n - 1) +
                    " edges, found " + std::to_string(edges.size()));
  }
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  for (auto [p, c] : edges) {
    if (p < 0 || c < 0 || p >= n || c >= n) throw DataError(ctx + "edge index out of range");
    if (c == 0) throw DataError(ctx + "root (node 0) cannot have a parent");
    if (parent[static_cast<std::size_t>(c)] != -1) {
      throw DataError(ctx + "node " + std::to_string(c) + " has more than one parent");
    }
    parent[static_cast<std::size_t>(c)] = p;
    children[static_cast<std::size_t>(p)].push_back(c);
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  Eigen::Index reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int c : children[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(c)]) throw DataError(ctx + "cycle in tree");
      seen[static_cast<std::size_t>(c)] = 1;
      ++reached;
      stack.push_back(c);
    }
  }
  if (reached != n) throw DataError(ctx + "tree is not connected to the root");
}

}  // namespace

const char* to_string(HyperedgeType t) {
  switch (t) {
    case HyperedgeType::kUser:
      return "user";
    case HyperedgeType::kTime:
      return "time";
    case HyperedgeType::kEntity:
      return "entity";
    case HyperedgeType::kLearned:
      return "learned";
  }
  return "unknown";
}

std::optional<HyperedgeType> parse_hyperedge_type(std::string_view s) {
  if (s == "user") return HyperedgeType::kUser;
  if (s == "time") return HyperedgeType::kTime;
  if (s == "entity") return HyperedgeType::kEntity;
  if (s == "learned") return HyperedgeType::kLearned;
  return std::nullopt;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(news.size());
  for (const auto& n : news) out.push_back(n.label);
  return out;
}

Matrix Dataset::text_matrix() const {
  Matrix m(static_cast<Eigen::Index>(news.size()), d_in);
  for (std::size_t i = 0; i < news.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(news[i].text_vec.data(), d_in);
  }
  return m;
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "news.jsonl", dir / "trees.jsonl", dir / "hyperedges.jsonl"};
}

Hypergraph build_incidence(std::span<const NewsRecord> news, std::span<const Hyperedge> hyperedges) {
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < news.size(); ++i) row_of.emplace(news[i].id, static_cast<Eigen::Index>(i));

  Hypergraph g;
  g.incidence = Matrix::Zero(static_cast<Eigen::Index>(news.size()), static_cast<Eigen::Index>(hyperedges.size()));
  for (std::size_t j = 0; j < hyperedges.size(); ++j) {
    const Hyperedge& e = hyperedges[j];
    if (e.members.empty()) throw DataError("hyperedge \"" + e.id + "\" is empty");
    for (const std::string& m : e.members) {
      auto it = row_of.find(m);
      if (it == row_of.end()) {
        throw DataError("hyperedge \"" + e.id + "\" references unknown news id \"" + m + "\"");
      }
      g.incidence(it->second, static_cast<Eigen::Index>(j)) = 1.0;
    }
    g.types.push_back(e.type);
    g.ids.push_back(e.id);
  }
  return g;
}

Eigen::Index detect_dimension(const std::filesystem::path& news) {
  Eigen::Index d = 0;
  bool done = false;
  for_each_jsonl(news, [&](const json& j, std::size_t line) {
    if (done) return;
    const json& v = require_key(j, "text_vec", news, line);
    if (!v.is_array() || v.empty()) throw DataError(where(news, line) + "text_vec must be a non-empty array");
    d = static_cast<Eigen::Index>(v.size());
    done = true;
  });
  if (!done) throw DataError(news.string() + ": no news records");
  return d;
}

Dataset load_dataset(const DatasetPaths& paths, Eigen::Index d_in) {
  if (d_in <= 0) throw DataError("d_in must be positive");
  Dataset data;
  data.d_in = d_in;

  std::unordered_map<std::string, std::size_t> index_of;
  for_each_jsonl(paths.news, [&](const json& j, std::size_t line) {
    NewsRecord r;
    r.id = require_key(j, "id", paths.news, line).get<std::string>();
    const json& label = require_key(j, "label", paths.news, line);
    if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
      throw DataError(where(paths.news, line) + "label must be 0 or 1");
    }
    r.label = label.get<int>();
    const json& text_vec = require_key(j, "text_vec", paths.news, line);
    try {
      r.text_vec = read_vector(text_vec);
    } catch (const DataError& e) {
      throw DataError(where(paths.news, line) + "text_vec: " + e.what());
    }
    if (static_cast<Eigen::Index>(r.text_vec.size()) != d_in) {
      throw DataError(where(paths.news, line) + "text_vec has dimension " + std::to_string(r.text_vec.size()) +
                      ", expected " + std::to_string(d_in));
    }
    if (!index_of.emplace(r.id, data.news.size()).second) {
      throw DataError(where(paths.news, line) + "duplicate news id \"" + r.id + "\"");
    }
    data.news.push_back(std::move(r));
  });

  std::vector<std::optional<PropagationTree>> trees(data.news.size());
  for_each_jsonl(paths.trees, [&](const json& j, std::size_t line) {
    PropagationTree t;
    t.news_id = require_key(j, "news_id", paths.trees, line).get<std::string>();
    auto it = index_of.find(t.news_id);
    if (it == index_of.end()) {
      throw DataError(where(paths.trees, line) + "tree for unknown news id \"" + t.news_id + "\"");
    }
    if (trees[it->second]) {
      throw DataError(where(paths.trees, line) + "duplicate tree for news id \"" + t.news_id + "\"");
    }
    const json& feats = require_key(j, "node_features", paths.trees, line);
    if (!feats.is_array() || feats.empty()) {
      throw DataError(where(paths.trees, line) + "node_features must be a non-empty array");
    }
    t.node_features.resize(static_cast<Eigen::Index>(feats.size()), d_in);
    for (std::size_t r = 0; r < feats.size(); ++r) {
      std::vector<double> row;
      try {
        row = read_vector(feats[r]);
      } catch (const DataError& e) {
        throw DataError(where(paths.trees, line) + "node_features: " + e.what());
      }
      if (static_cast<Eigen::Index>(row.size()) != d_in) {
        throw DataError(where(paths.trees, line) + "node feature row " + std::to_string(r) + " has dimension " +
                        std::to_string(row.size()) + ", expected " + std::to_string(d_in));
      }
      t.node_features.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), d_in);
    }
    for (const json& e : require_key(j, "edges", paths.trees, line)) {
      if (!e.is_array() || e.size() != 2) throw DataError(where(paths.trees, line) + "edge must be [parent, child]");
      t.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    validate_tree(t.num_nodes(), t.edges, where(paths.trees, line));
    trees[it->second] = std::move(t);
  });
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (!trees[i]) throw DataError(paths.trees.filename().string() + ": missing tree for news id \"" + data.news[i].id + "\"");
    data.trees.push_back(std::move(*trees[i]));
  }

  std::unordered_set<std::string> edge_ids;
  for_each_jsonl(paths.hyperedges, [&](const json& j, std::size_t line) {
    Hyperedge e;
    e.id = require_key(j, "id", paths.hyperedges, line).get<std::string>();
    const auto type_name = require_key(j, "type", paths.hyperedges, line).get<std::string>();
    auto type = parse_hyperedge_type(type_name);
    if (!type) throw DataError(where(paths.hyperedges, line) + "unknown hyperedge type \"" + type_name + "\"");
    e.type = *type;
    e.members = require_key(j, "members", paths.hyperedges, line).get<std::vector<std::string>>();
    if (e.members.empty()) throw DataError(where(paths.hyperedges, line) + "hyperedge \"" + e.id + "\" is empty");
    for (const auto& m : e.members) {
      if (!index_of.count(m)) {
        throw DataError(where(paths.hyperedges, line) + "hyperedge \"" + e.id + "\" references unknown news id \"" +
                        m + "\"");
      }
    }
    if (!edge_ids.insert(e.id).second) {
      throw DataError(where(paths.hyperedges, line) + "duplicate hyperedge id \"" + e.id + "\"");
    }
    data.hyperedges.push_back(std::move(e));
  });

  data.hypergraph = build_incidence(data.news, data.hyperedges);
  return data;
}

std::vector<Interaction> load_interactions(const std::filesystem::path& path) {
  std::vector<Interaction> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    Interaction r;
    r.user = require_key(j, "user", path, line).get<std::string>();
    r.news_id = require_key(j, "news_id", path, line).get<std::string>();
    if (auto it = j.find("time"); it != j.end()) r.time = it->get<double>();
    if (auto it = j.find("entities"); it != j.end()) r.entities = it->get<std::vector<std::string>>();
    out.push_back(std::move(r));
  });
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& dir, std::span<const Interaction> interactions) {
  std::filesystem::create_directories(dir);
  std::vector<json> rows;
  rows.reserve(data.news.size());
  for (const auto& n : data.news) {
    rows.push_back(json{{"id", n.id}, {"label", n.label}, {"text_vec", n.text_vec}});
  }
  write_lines(dir / "news.jsonl", rows);

  rows.clear();
  for (const auto& t : data.trees) {
    json feats = json::array();
    for (Eigen::Index r = 0; r < t.node_features.rows(); ++r) {
      std::vector<double> row(t.node_features.row(r).data(), t.node_features.row(r).data() + t.node_features.cols());
      feats.push_back(std::move(row));
    }
    json edges = json::array();
    for (auto [p, c] : t.edges) edges.push_back({p, c});
    rows.push_back(json{{"news_id", t.news_id}, {"node_features", std::move(feats)}, {"edges", std::move(edges)}});
  }
  write_lines(dir / "trees.jsonl", rows);

  rows.clear();
  for (const auto& e : data.hyperedges) {
    rows.push_back(json{{"id", e.id}, {"type", to_string(e.type)}, {"members", e.members}});
  }
  write_lines(dir / "hyperedges.jsonl", rows);

  if (!interactions.empty()) {
    rows.clear();
    for (const auto& r : interactions) {
      rows.push_back(json{{"user", r.user}, {"news_id", r.news_id}, {"time", r.time}, {"entities", r.entities}});
    }
    write_lines(dir / "interactions.jsonl", rows);
  }
}

// ---------------------------------------------------------------------------

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * ratios[i];
    // Guard against 0.6 * 10 landing a hair below 6.
    const double fl = std::floor(exact + 1e-9);
    sizes[i] = static_cast<std::size_t>(fl);
    frac[i] = exact - fl;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    ++sizes[order[k]];
    ++assigned;
  }
  return sizes;
}

DatasetSplit split_dataset(std::span<const int> labels, const SplitRatios& ratios, Rng& rng) {
  const std::size_t n = labels.size();
  if (n < 5) throw DataError("split_dataset: need at least 5 items, got " + std::to_string(n));
  double total = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw DataError("split_dataset: ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DataError("split_dataset: ratios must sum to 1");

  // Shuffle within each class, then interleave classes proportionally so every
  // prefix of the merged order is class-balanced to within one item.
  std::map<int, std::vector<Eigen::Index>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(static_cast<Eigen::Index>(i));
  struct Keyed {
    double key;
    int label;
    Eigen::Index index;
  };
  std::vector<Keyed> merged;
  merged.reserve(n);
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const double size = static_cast<double>(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      merged.push_back({(static_cast<double>(r) + 0.5) / size, label, members[r]});
    }
  }
  std::sort(merged.begin(), merged.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.label < b.label;
  });

  const auto sizes = split_sizes(n, ratios);
  DatasetSplit split;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    auto& dst = s == 0 ? split.train : (s == 1 ? split.val : split.test);
    for (std::size_t k = 0; k < sizes[s]; ++k) dst.push_back(merged[pos++].index);
    std::sort(dst.begin(), dst.end());
  }
  return split;
}

DatasetSplit split_dataset(std::span<const int> labels, const SplitRatios& ratios, std::uint64_t seed) {
  Rng rng(seed);
  DatasetSplit s = split_dataset(labels, ratios, rng);
  s.seed = seed;
  return s;
}

}  // namespace hypernews
