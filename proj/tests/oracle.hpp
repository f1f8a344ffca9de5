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

// Loop-only reference implementations used as test oracles. Nothing here calls
// the library's recorded ops; values are computed entry by entry.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "hypernews/tensor.hpp"

namespace hypernews::oracle {

using Row = std::vector<double>;
using Grid = std::vector<Row>;

inline Grid to_grid(const Matrix& m) {
  Grid g(static_cast<std::size_t>(m.rows()), Row(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return g;
}

inline Matrix to_matrix(const Grid& g) {
  const auto rows = static_cast<Eigen::Index>(g.size());
  const auto cols = g.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(g.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

inline Grid zeros(std::size_t r, std::size_t c) { return Grid(r, Row(c, 0.0)); }

inline Grid matmul(const Grid& a, const Grid& b) {
  Grid out = zeros(a.size(), b.empty() ? 0 : b.front().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < b[k].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

inline Row vecmat(const Row& v, const Grid& w) { return matmul(Grid{v}, w).front(); }

inline Grid transpose(const Grid& a) {
  Grid out = zeros(a.empty() ? 0 : a.front().size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
  }
  return out;
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double leaky(double x, double slope) { return x > 0.0 ? x : slope * x; }

inline Row relu(Row v) {
  for (double& x : v) x = relu(x);
  return v;
}

inline double dot(const Row& a, const Row& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(const Row& a, const Row& b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return dot(a, b) / (na * nb);
}

inline Row hadamard(const Row& a, const Row& w) {
  Row out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * w[i];
  return out;
}

/// Softmax of `scores` over the positions where `keep` is true; others get 0.
inline Row masked_softmax(const Row& scores, const std::vector<bool>& keep) {
  double top = -1e300;
  bool any = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (keep[i]) {
      top = std::max(top, scores[i]);
      any = true;
    }
  }
  Row out(scores.size(), 0.0);
  if (!any) return out;
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (keep[i]) z += std::exp(scores[i] - top);
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (keep[i]) out[i] = std::exp(scores[i] - top) / z;
  }
  return out;
}

inline Row softmax(const Row& scores) { return masked_softmax(scores, std::vector<bool>(scores.size(), true)); }

/// Weighted mean of node rows under incidence column j; zero row when the column sums to 0.
inline Row column_mean(const Grid& incidence, const Grid& x, std::size_t j) {
  Row out(x.front().size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += incidence[i][j];
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += incidence[i][j] * x[i][d];
  }
  if (total <= 0.0) return Row(out.size(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

// ---------------------------------------------------------------------------
// Structure learning

/// Smallest k with k >= p * n, up to 1e-9 of rounding slack.
inline std::size_t topk_count(double p, std::size_t n) {
  std::size_t k = 0;
  while (k < n && static_cast<double>(k) < p * static_cast<double>(n) - 1e-9) ++k;
  return k;
}

/// Ranking key: values on a 1e-12 grid, so rounding noise ties.
inline double rank_key(double v) { return std::round(v / 1e-12); }

/// Per column: keep entries whose rank (larger first, lower index on ties) is below k.
inline Grid topk(const Grid& s, double p) {
  const std::size_t n = s.size();
  const std::size_t m = n == 0 ? 0 : s.front().size();
  const std::size_t k = topk_count(p, n);
  Grid out = zeros(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t rank = 0;
      for (std::size_t o = 0; o < n; ++o) {
        const double ko = rank_key(s[o][j]);
        const double ki = rank_key(s[i][j]);
        if (ko > ki || (ko == ki && o < i)) ++rank;
      }
      if (rank < k) out[i][j] = relu(s[i][j]);
    }
  }
  return out;
}

inline Grid similarity(const Grid& nodes, const Grid& edges, const Row& w) {
  Grid s = zeros(nodes.size(), edges.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < edges.size(); ++j) s[i][j] = cosine(hadamard(nodes[i], w), hadamard(edges[j], w));
  }
  return s;
}

inline bool all_zero(const Grid& g) {
  for (const Row& r : g) {
    for (double v : r) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

inline Grid fuse(const Grid& h, const Grid& h_ebd, const Grid& h_text, const Row& alpha) {
  if (all_zero(h_ebd) && all_zero(h_text)) return h;
  const Row w = softmax(alpha);
  Grid out = h;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h[i].size(); ++j) {
      out[i][j] = std::clamp(w[0] * h[i][j] + w[1] * h_ebd[i][j] + w[2] * h_text[i][j], 0.0, 1.0);
    }
  }
  return out;
}

struct DhslWeights {
  Row w_ebd;
  Row w_text;
  Row alpha;
  Grid text_proj;
  double p_thd = 0.0;
};

inline Grid text_structure(const Grid& text, const Grid& current, const DhslWeights& d) {
  const Grid projected = matmul(text, d.text_proj);
  Grid anchors;
  for (std::size_t j = 0; j < current.front().size(); ++j) anchors.push_back(column_mean(current, projected, j));
  return topk(similarity(projected, anchors, d.w_text), d.p_thd);
}

// ---------------------------------------------------------------------------
// Hypergraph encoder

struct HgLayer {
  Grid w1;
  Grid w2;
  Grid att;
};

struct HgTrace {
  Grid embeddings;
  std::vector<Grid> reconstructed;
};

/// Eval-mode forward of stacked attention hypergraph layers, with optional
/// structure learning (`dhsl` null disables it).
inline HgTrace hypergraph_forward(const Grid& x, const Grid& incidence, const std::vector<HgLayer>& layers,
                                  const DhslWeights* dhsl, const Grid& text, double slope = 0.2) {
  HgTrace trace;
  Grid h = x;
  Grid structure = incidence;
  const std::size_t n = x.size();
  for (const HgLayer& layer : layers) {
    const std::size_t m = structure.front().size();
    const Grid p = matmul(h, layer.w1);

    // node -> hyperedge
    Grid u;
    for (std::size_t j = 0; j < m; ++j) {
      const Row seed = column_mean(structure, p, j);
      const Row seed_t = vecmat(seed, layer.att);
      Row scores(n, 0.0);
      std::vector<bool> keep(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        keep[i] = structure[i][j] > 0.0;
        scores[i] = leaky(cosine(seed_t, vecmat(p[i], layer.att)), slope);
      }
      const Row a = masked_softmax(scores, keep);
      Row acc(p.front().size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += a[i] * structure[i][j] * p[i][d];
      }
      u.push_back(relu(acc));
    }

    Grid reconstructed = structure;
    Grid next = structure;
    if (dhsl != nullptr) {
      const Grid h_ebd = topk(similarity(p, u, dhsl->w_ebd), dhsl->p_thd);
      reconstructed = fuse(structure, h_ebd, text_structure(text, structure, *dhsl), dhsl->alpha);
      next = fuse(reconstructed, h_ebd, text_structure(text, reconstructed, *dhsl), dhsl->alpha);
    }

    // hyperedge -> node
    Grid out;
    for (std::size_t i = 0; i < n; ++i) {
      const Row node_t = vecmat(p[i], layer.att);
      Row scores(m, 0.0);
      std::vector<bool> keep(m, false);
      for (std::size_t j = 0; j < m; ++j) {
        keep[j] = reconstructed[i][j] > 0.0;
        scores[j] = leaky(cosine(node_t, vecmat(u[j], layer.att)), slope);
      }
      const Row a = masked_softmax(scores, keep);
      Row acc(u.front().size(), 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += a[j] * reconstructed[i][j] * u[j][d];
      }
      out.push_back(relu(vecmat(acc, layer.w2)));
    }
    trace.reconstructed.push_back(reconstructed);
    h = out;
    structure = next;
  }
  trace.embeddings = h;
  return trace;
}

// ---------------------------------------------------------------------------
// Propagation encoder

struct Tree {
  Grid features;
  std::vector<std::pair<int, int>> edges;  // (parent, child)
};

struct SageLayer {
  Grid self;
  Grid neighbor;
};

/// Per-node loop: mean over tree neighbours (parent and children), then
/// relu(x W_self + mean W_nbr). Returns the root row after all layers.
inline Row encode_tree(const Tree& tree, const std::vector<SageLayer>& layers) {
  Grid h = tree.features;
  const std::size_t n = h.size();
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (auto [p, c] : tree.edges) {
    nbrs[static_cast<std::size_t>(p)].push_back(static_cast<std::size_t>(c));
    nbrs[static_cast<std::size_t>(c)].push_back(static_cast<std::size_t>(p));
  }
  for (const SageLayer& layer : layers) {
    Grid next;
    for (std::size_t v = 0; v < n; ++v) {
      Row agg(h[v].size(), 0.0);
      for (std::size_t w : nbrs[v]) {
        for (std::size_t d = 0; d < agg.size(); ++d) agg[d] += h[w][d] / static_cast<double>(nbrs[v].size());
      }
      const Row a = vecmat(h[v], layer.self);
      const Row b = vecmat(agg, layer.neighbor);
      Row o(a.size());
      for (std::size_t d = 0; d < o.size(); ++d) o[d] = relu(a[d] + b[d]);
      next.push_back(o);
    }
    h = next;
  }
  return h.front();
}

// ---------------------------------------------------------------------------
// Losses

/// Mean over anchors with both positives and negatives of
/// -log[ (1/|K|) sum_K exp(cos/tau) / sum_T exp(cos/tau) ]; 0 if no anchor qualifies.
inline double infonce(const Grid& pro, const Grid& hg, const std::vector<int>& labels, double tau) {
  double total = 0.0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double pos = 0.0;
    double neg = 0.0;
    std::size_t npos = 0;
    std::size_t nneg = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const double e = std::exp(cosine(pro[i], hg[k]) / tau);
      if (labels[k] != labels[i]) {
        neg += e;
        ++nneg;
      } else if (k != i) {
        pos += e;
        ++npos;
      }
    }
    if (npos == 0 || nneg == 0) continue;
    total += -std::log((pos / static_cast<double>(npos)) / neg);
    ++anchors;
  }
  return anchors == 0 ? 0.0 : total / static_cast<double>(anchors);
}

inline double cross_entropy(const Grid& probs, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total -= std::log(std::max(probs[i][static_cast<std::size_t>(labels[i])], 1e-12));
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace hypernews::oracle
