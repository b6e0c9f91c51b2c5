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

// Intervention levers: class weighting (manual or calibrated to target cost
// ratios), down-weighting one outcome class, and test-time feature
// transforms restricted to a group.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairboost/gbm.h"
#include "fairboost/tabular.h"

namespace fairboost {

struct CostRatioCalibration {
  // target[i][j]: desired counts[i][j] / counts[j][i] on the training table.
  std::vector<std::vector<double>> target;
  std::vector<std::vector<double>> achieved;  // same layout; NaN where 0/0
  int iterations = 0;
  bool converged = false;
  double tolerance = 0.0;

  friend bool operator==(const CostRatioCalibration&, const CostRatioCalibration&) = default;
};

struct WeightPlan {
  enum class Provenance { kManual, kCalibrated };

  std::vector<double> class_weights;
  Provenance provenance = Provenance::kManual;
  std::optional<CostRatioCalibration> calibration;

  static WeightPlan Manual(std::vector<double> weights);
  // Throws kConfig unless every weight is finite and positive.
  void Validate(int n_classes) const;

  friend bool operator==(const WeightPlan&, const WeightPlan&) = default;
};

// Row weight <- row weight * class_weights[label].
Dataset ApplyWeightPlan(const Dataset& data, const WeightPlan& plan);

// All-ones target of size K ("every error type costs the same").
std::vector<std::vector<double>> UniformCostTarget(int n_classes);

// Empirical ratio counts[i][j] / counts[j][i]; NaN when both are zero and
// +inf when only the denominator is.
std::vector<std::vector<double>> EmpiricalCostRatios(const std::vector<std::vector<double>>& counts);

// True when target[i][j] (1 - tol) <= ratio <= target[i][j] / (1 - tol) for
// every pair i < j. Pairs with no errors in either direction count as met.
bool CostRatiosWithin(const std::vector<std::vector<double>>& ratios,
                      const std::vector<std::vector<double>>& target, double tolerance);

// Trains on weighted data, reads the training confusion table, and updates
// class weights multiplicatively in log space,
//   log w_i += s_i * sum_j log(r_ij / t_ij) / (2 (K-1))
// (r from half-smoothed counts, each step clamped to [-1, 1]). The per-class
// step size s_i starts at 1, halves whenever the step changes sign and
// otherwise grows by 1.2 up to 1. Stops when every pair is within tolerance
// or after max_iter fits. Starts from inverse class-weight frequencies.
// The best iterate is returned; calibration->converged reports success.
WeightPlan CalibrateCostRatios(const Dataset& data, const GbmConfig& config,
                               const std::vector<std::vector<double>>& target, int max_iter,
                               double tolerance);

// ApplyWeightPlan with weight `factor` for cls and 1 elsewhere.
// Throws kDomain unless 0 < factor <= 1.
Dataset DownweightClass(const Dataset& data, int cls, double factor);

struct FeatureSelector {
  std::vector<std::string> names;
  FlagSet flags;  // any feature carrying one of these flags

  friend bool operator==(const FeatureSelector&, const FeatureSelector&) = default;
};

struct TransformOp {
  enum class Kind { kSqrt, kScale, kRecode };
  Kind kind = Kind::kSqrt;
  double factor = 1.0;  // kScale
  double from = 0.0;    // kRecode
  double to = 0.0;      // kRecode

  static TransformOp Sqrt() { return {Kind::kSqrt, 1.0, 0.0, 0.0}; }
  static TransformOp Scale(double c) { return {Kind::kScale, c, 0.0, 0.0}; }
  static TransformOp Recode(double from, double to) { return {Kind::kRecode, 1.0, from, to}; }

  friend bool operator==(const TransformOp&, const TransformOp&) = default;
};

struct TransformStep {
  FeatureSelector features;
  std::optional<std::string> group;  // nullopt: every group
  TransformOp op;

  friend bool operator==(const TransformStep&, const TransformStep&) = default;
};

struct TransformSpec {
  std::vector<TransformStep> steps;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

// Feature indices matched by a selector, ascending. Throws kSchema when a
// name is unknown or nothing matches.
std::vector<std::size_t> ResolveFeatures(const Schema& schema, const FeatureSelector& selector);

// Applies the steps in order to matching rows/features. Labels, weights and
// group tags are untouched. Throws kDomain (naming row and feature) for the
// square root of a negative value and kConfig for a non-positive scale.
Dataset ApplyTransform(const Dataset& test, const TransformSpec& spec);

}  // namespace fairboost
