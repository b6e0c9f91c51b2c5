// Copyright 2026 The fairboost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairboost/tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairboost/error.h"

namespace fairboost {

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::kFit, "tree must have at least one node");
  // Every non-root node must be referenced exactly once, by a node with a
  // smaller index. That rules out cycles and orphans.
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) {
      if (n.left != -1 || n.right != -1) {
        throw Error(ErrorCode::kFit, "leaf node " + std::to_string(i) + " has children");
      }
      continue;
    }
    for (int c : {n.left, n.right}) {
      if (c <= static_cast<int>(i) || c >= static_cast<int>(nodes_.size())) {
        throw Error(ErrorCode::kFit, "node " + std::to_string(i) + " has invalid child");
      }
      ++parents[static_cast<std::size_t>(c)];
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) throw Error(ErrorCode::kFit, "node " + std::to_string(i) + " is not a tree child");
  }
}

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int Tree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

double LeafValue(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? -g / denom : 0.0;
}

double StructureScore(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

double SplitGain(double gl, double hl, double gr, double hr, double lambda) {
  return 0.5 * (StructureScore(gl, hl, lambda) + StructureScore(gr, hr, lambda) -
                StructureScore(gl + gr, hl + hr, lambda));
}

bool IsPositiveGain(double gain, double g, double h, double lambda) {
  return gain > kMinSplitGainRelative * StructureScore(g, h, lambda) && gain > 0.0;
}

TreeBuilder::TreeBuilder(FeatureMatrix x) : x_(x), sorted_(x.n_features) {
  if (x.n_rows > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kSize, "too many rows for tree builder");
  }
  for (std::size_t f = 0; f < x_.n_features; ++f) {
    auto& col = sorted_[f];
    col.resize(x_.n_rows);
    for (std::size_t r = 0; r < x_.n_rows; ++r) {
      col[r] = SortedEntry{x_.at(r, f), static_cast<std::uint32_t>(r)};
    }
    std::stable_sort(col.begin(), col.end(), [](const SortedEntry& a, const SortedEntry& b) {
      return a.value < b.value;
    });
  }
}

namespace {

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
};

struct BestSplit {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct ScanState {
  double gl = 0.0;
  double hl = 0.0;
  double last = 0.0;
  bool has_last = false;
};

double Midpoint(double a, double b) {
  double mid = a + (b - a) * 0.5;
  // Keep a < mid <= b so that `a` routes left and `b` routes right.
  if (!(mid > a)) mid = b;
  return mid;
}

}  // namespace

Tree TreeBuilder::Fit(std::span<const std::size_t> rows, std::span<const double> grad,
                      std::span<const double> hess, const TreeParams& params) const {
  if (rows.empty()) throw Error(ErrorCode::kFit, "cannot fit a tree on zero rows");
  if (grad.size() < x_.n_rows || hess.size() < x_.n_rows) {
    throw Error(ErrorCode::kSize, "gradient/hessian arrays shorter than the row count");
  }
  if (params.max_depth < 0 || params.lambda < 0.0 || params.min_child_weight < 0.0) {
    throw Error(ErrorCode::kConfig, "invalid tree parameters");
  }

  // pos[r]: node currently holding row r, or -1 when r is outside the fit or
  // already sits in a finished leaf.
  std::vector<int> pos(x_.n_rows, -1);
  NodeStats root;
  for (std::size_t r : rows) {
    if (r >= x_.n_rows) throw Error(ErrorCode::kSize, "row index out of range");
    if (pos[r] == 0) throw Error(ErrorCode::kFit, "duplicate row index in fit subset");
    if (!(hess[r] >= 0.0)) throw Error(ErrorCode::kNumeric, "negative or NaN hessian");
    pos[r] = 0;
    root.g += grad[r];
    root.h += hess[r];
  }

  std::vector<TreeNode> nodes(1);
  std::vector<NodeStats> stats{root};
  std::vector<int> frontier{0};
  std::vector<int> slot_of;  // node id -> frontier slot, -1 if not expanding

  for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    slot_of.assign(nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot_of[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);

    std::vector<BestSplit> best(frontier.size());
    std::vector<ScanState> scan(frontier.size());
    for (std::size_t f = 0; f < x_.n_features; ++f) {
      std::fill(scan.begin(), scan.end(), ScanState{});
      for (const SortedEntry& e : sorted_[f]) {
        const int node = pos[e.row];
        if (node < 0) continue;
        const int slot = slot_of[static_cast<std::size_t>(node)];
        if (slot < 0) continue;
        ScanState& st = scan[static_cast<std::size_t>(slot)];
        if (st.has_last && e.value != st.last) {
          const NodeStats& tot = stats[static_cast<std::size_t>(node)];
          const double gr = tot.g - st.gl;
          const double hr = tot.h - st.hl;
          if (st.hl >= params.min_child_weight && hr >= params.min_child_weight) {
            const double gain = SplitGain(st.gl, st.hl, gr, hr, params.lambda);
            BestSplit& b = best[static_cast<std::size_t>(slot)];
            const double scale = StructureScore(tot.g, tot.h, params.lambda) + std::abs(b.gain);
            if ((b.feature < 0 || gain > b.gain + kGainTieRelative * scale) &&
                IsPositiveGain(gain, tot.g, tot.h, params.lambda)) {
              b = BestSplit{gain, static_cast<int>(f), Midpoint(st.last, e.value)};
            }
          }
        }
        st.gl += grad[e.row];
        st.hl += hess[e.row];
        st.last = e.value;
        st.has_last = true;
      }
    }

    std::vector<int> next;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      const int id = frontier[s];
      const BestSplit& b = best[s];
      if (b.feature < 0) {
        slot_of[static_cast<std::size_t>(id)] = -1;
        continue;
      }
      const int left = static_cast<int>(nodes.size());
      nodes.emplace_back();
      nodes.emplace_back();
      stats.emplace_back();
      stats.emplace_back();
      TreeNode& n = nodes[static_cast<std::size_t>(id)];
      n.feature = b.feature;
      n.threshold = b.threshold;
      n.gain = b.gain;
      n.left = left;
      n.right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }

    // Route rows to children; child totals are re-accumulated in row order.
    for (std::size_t r : rows) {
      const int node = pos[r];
      if (node < 0) continue;
      const TreeNode& n = nodes[static_cast<std::size_t>(node)];
      if (n.is_leaf()) {
        pos[r] = -1;
        continue;
      }
      const int child = x_.at(r, static_cast<std::size_t>(n.feature)) < n.threshold ? n.left : n.right;
      pos[r] = child;
      stats[static_cast<std::size_t>(child)].g += grad[r];
      stats[static_cast<std::size_t>(child)].h += hess[r];
    }
    frontier = std::move(next);
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].cover = stats[i].h;
    nodes[i].value = LeafValue(stats[i].g, stats[i].h, params.lambda);
  }
  return Tree(std::move(nodes));
}

Tree FitTree(const FeatureMatrix& x, std::span<const std::size_t> rows,
             std::span<const double> grad, std::span<const double> hess,
             const TreeParams& params) {
  if (rows.empty()) throw Error(ErrorCode::kFit, "cannot fit a tree on zero rows");
  TreeBuilder builder(x);
  return builder.Fit(rows, grad, hess, params);
}

}  // namespace fairboost
