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

// Second-order regression trees fitted to per-row gradient/hessian pairs.
//
// Split search is exact greedy: every midpoint between consecutive distinct
// values of a feature (within the node) is a candidate, scored by
//
//   gain = 1/2 [ GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda) ]
//
// and a node becomes a leaf with value -G/(H+lambda) when no candidate has
// positive gain with both children holding at least min_child_weight of
// hessian. Equal gains resolve to the lower feature index, then the lower
// threshold. Rows with value < threshold go left.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fairboost {

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // -G/(H+lambda); meaningful for leaves
  double gain = 0.0;   // split gain; 0 for leaves
  double cover = 0.0;  // hessian sum reaching the node

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t n_leaves() const;
  int depth() const;

  // Leaf value reached by x. Node 0 is the root.
  double Predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
      const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
      i = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(i)].value;
  }

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeParams {
  int max_depth = 4;
  double min_child_weight = 1.0;
  double lambda = 1.0;
};

// Row-major view over a feature matrix.
struct FeatureMatrix {
  std::span<const double> values;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;

  double at(std::size_t r, std::size_t f) const { return values[r * n_features + f]; }
  std::span<const double> row(std::size_t r) const {
    return values.subspan(r * n_features, n_features);
  }
};

// Smallest gain treated as an improvement. Gains below this are roundoff
// on splits whose exact gain is zero.
inline constexpr double kMinSplitGainRelative = 1e-12;
// Candidates are scanned by (feature, threshold); a later one replaces the
// incumbent only if it wins by more than this fraction of the gain scale, so
// splits whose gains differ by roundoff alone resolve to the lower feature
// and threshold.
inline constexpr double kGainTieRelative = 1e-10;

double LeafValue(double g, double h, double lambda);
double StructureScore(double g, double h, double lambda);
double SplitGain(double gl, double hl, double gr, double hr, double lambda);
// True when a split of the given gain is accepted at a node with totals (g,h).
bool IsPositiveGain(double gain, double g, double h, double lambda);

// Caches per-feature sorted orders so many trees can be fitted on the same
// matrix without re-sorting.
class TreeBuilder {
 public:
  explicit TreeBuilder(FeatureMatrix x);

  // rows: subset of row indices (any order, no duplicates). grad/hess are
  // indexed by row and must cover every row of the matrix.
  Tree Fit(std::span<const std::size_t> rows, std::span<const double> grad,
           std::span<const double> hess, const TreeParams& params) const;

 private:
  struct SortedEntry {
    double value;
    std::uint32_t row;
  };
  FeatureMatrix x_;
  std::vector<std::vector<SortedEntry>> sorted_;
};

// One-shot convenience wrapper. Throws kFit on empty rows, kNumeric on
// negative hessians.
Tree FitTree(const FeatureMatrix& x, std::span<const std::size_t> rows,
             std::span<const double> grad, std::span<const double> hess,
             const TreeParams& params);

}  // namespace fairboost
