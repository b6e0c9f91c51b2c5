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

// Multi-class stochastic gradient boosting with a softmax link.
//
// Each round draws a row subsample, evaluates the gradient and diagonal
// hessian of the weighted multinomial deviance at the current scores, fits
// one regression tree per class and adds learning_rate times its leaf
// values to that class's score.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairboost/tabular.h"
#include "fairboost/tree.h"

namespace fairboost {

struct GbmConfig {
  int n_rounds = 300;
  double learning_rate = 0.1;
  int max_depth = 4;
  double min_child_weight = 1.0;  // minimum hessian sum per leaf
  double subsample = 0.8;
  int n_classes = 3;
  std::uint64_t seed = 0;
  double lambda = 1.0;

  // Throws kConfig when a field is out of range.
  void Validate() const;
  TreeParams tree_params() const { return {max_depth, min_child_weight, lambda}; }

  friend bool operator==(const GbmConfig&, const GbmConfig&) = default;
};

using ClassProbabilities = std::vector<double>;

// exp(s_k - max s) / sum_j exp(s_j - max s). Throws kNumeric on non-finite input.
ClassProbabilities Softmax(std::span<const double> scores);

// Index of the largest value; ties go to the lowest index.
int ArgMax(std::span<const double> values);

struct GradHess {
  std::vector<double> grad;
  std::vector<double> hess;
};

// grad_k = w (p_k - [k == label]),  hess_k = w p_k (1 - p_k).
GradHess DevianceGradHess(int label, std::span<const double> probabilities, double weight);

// Weighted multinomial deviance of one row: -w log softmax(scores)[label].
double Deviance(int label, std::span<const double> scores, double weight);

class BoostModel {
 public:
  GbmConfig config;
  std::vector<double> base_scores;
  std::vector<std::vector<Tree>> rounds;  // rounds[t][k]
  Schema schema;
  std::vector<std::string> class_names;
  std::optional<std::string> training_group;
  std::string training_rows_fingerprint;

  int n_classes() const { return static_cast<int>(base_scores.size()); }

  // Base scores plus learning_rate times the summed leaf values. Throws
  // kSchema when x does not match the trained schema width.
  std::vector<double> PredictScores(std::span<const double> x) const;
  ClassProbabilities PredictProba(std::span<const double> x) const;
  int PredictClass(std::span<const double> x) const;

  // Row-wise predictions; throws kSchema unless data's schema equals the
  // trained schema.
  std::vector<int> PredictClasses(const Dataset& data) const;
  std::vector<ClassProbabilities> PredictProbaAll(const Dataset& data) const;

  void CheckSchema(const Schema& other) const;

  friend bool operator==(const BoostModel&, const BoostModel&) = default;
};

struct TrainingLog {
  // Weighted training deviance before round 0 and after every round.
  std::vector<double> deviance;
};

// Fits a model on every row of data. Row weights are rescaled by the
// smallest positive weight, which makes the fit invariant to a global
// weight scale and makes integer weights equivalent to row duplication.
// Throws kDegenerateClass when some class has zero total weight.
BoostModel Train(const Dataset& data, const GbmConfig& config, TrainingLog* log = nullptr);

}  // namespace fairboost
