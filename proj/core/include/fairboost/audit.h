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

// Per-group confusion tables and the metrics read off them:
//
//   classification error (row i)  = off-diagonal mass of row i / row i mass
//   prediction error (column j)   = off-diagonal mass of column j / column j mass
//   predicted share (column j)    = column j mass / total mass
//
// Rows are observed classes, columns predicted classes. An error over a row
// or column with zero mass is undefined (nullopt), never 0.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairboost/gbm.h"
#include "fairboost/tabular.h"

namespace fairboost {

inline constexpr char kAllGroups[] = "all";

struct ConfusionReport {
  std::string group = kAllGroups;
  int n_classes = 0;
  std::vector<std::vector<double>> counts;  // [observed][predicted]
  std::vector<std::optional<double>> row_errors;
  std::vector<std::optional<double>> col_errors;
  std::vector<double> predicted_shares;
  std::vector<double> observed_shares;
  double n = 0.0;

  friend bool operator==(const ConfusionReport&, const ConfusionReport&) = default;
};

// Throws kSize on length mismatch, kNumeric on zero total weight, kLabel on
// out-of-range classes. Empty weights mean unit weights.
ConfusionReport Confusion(std::span<const int> labels, std::span<const int> predictions,
                          std::span<const double> weights, int n_classes,
                          const std::string& group = kAllGroups);

// Builds the report from a ready K x K count matrix.
ConfusionReport ConfusionFromCounts(const std::vector<std::vector<double>>& counts,
                                    const std::string& group = kAllGroups);

// Signed differences group_a - group_b.
struct GroupDisparity {
  std::string group_a;
  std::string group_b;
  std::vector<double> predicted_share_diff;
  std::vector<std::optional<double>> col_error_diff;

  friend bool operator==(const GroupDisparity&, const GroupDisparity&) = default;
};

GroupDisparity Disparity(const ConfusionReport& a, const ConfusionReport& b);

struct AuditBundle {
  std::optional<std::string> training_group;
  std::vector<std::string> class_names;
  std::map<std::string, ConfusionReport> reports;  // per group plus "all"
  std::vector<GroupDisparity> disparities;          // every group pair, a < b
  std::string model_schema_fingerprint;
  std::string test_rows_fingerprint;

  friend bool operator==(const AuditBundle&, const AuditBundle&) = default;
};

// Partitions one set of predictions by group tag.
AuditBundle AuditPredictions(std::span<const int> labels, std::span<const int> predictions,
                             std::span<const double> weights,
                             const std::vector<std::string>& groups, int n_classes);

// Predicts every test row once, then audits per group. Throws kSchema on
// schema mismatch and kEmptySelection on an empty test set.
AuditBundle AuditByGroup(const BoostModel& model, const Dataset& test);

enum class BaselineKind { kMajorityClass, kReleaseAll, kReleaseNone, kCoinFlip };

// release_all predicts class 0 for everyone, release_none the last class,
// majority_class the weighted modal class, coin_flip a uniform class.
struct BaselinePolicy {
  BaselineKind kind = BaselineKind::kMajorityClass;
  std::uint64_t seed = 0;
};

std::string_view BaselineKindName(BaselineKind kind);
BaselineKind ParseBaselineKind(std::string_view name);

ConfusionReport ApplyBaselinePolicy(const BaselinePolicy& policy, std::span<const int> labels,
                                    int n_classes, std::span<const double> weights = {});

// Selects one scalar out of a ConfusionReport of one group.
struct MetricSelector {
  enum class Metric { kPredictedShare, kColError, kRowError };
  Metric metric = Metric::kPredictedShare;
  int cls = 0;
  std::string group = kAllGroups;

  // Text form "<metric>:<class>[@<group>]", e.g. "predicted_share:2@B".
  static MetricSelector Parse(std::string_view text);
  std::string ToString() const;

  friend bool operator==(const MetricSelector&, const MetricSelector&) = default;
};

std::optional<double> EvaluateMetric(const ConfusionReport& report, const MetricSelector& sel);

struct BootstrapResult {
  MetricSelector statistic;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  int replicates = 0;
  int redraws = 0;  // resamples discarded because the statistic was undefined
  std::uint64_t seed = 0;
};

// Percentile bootstrap over the rows of the selected group with predictions
// held fixed. Throws kConfig for B < 100 or level outside (0,1), kNumeric if
// the statistic is undefined on the original sample.
BootstrapResult BootstrapCi(std::span<const int> labels, std::span<const int> predictions,
                            std::span<const double> weights,
                            const std::vector<std::string>& groups, int n_classes,
                            const MetricSelector& statistic, int replicates, double level,
                            std::uint64_t seed);

BootstrapResult BootstrapCi(const Dataset& test, const BoostModel& model,
                            const MetricSelector& statistic, int replicates, double level,
                            std::uint64_t seed);

struct RobustnessOptions {
  std::vector<GbmConfig> grid;
  // One split per seed; training also reseeds its subsampling from it.
  std::vector<std::uint64_t> split_seeds;
  std::optional<std::string> training_group;
  // Per-class multipliers for training-row weights; empty for none.
  std::vector<double> class_weights;
  double threshold = 0.05;
};

struct MetricDispersion {
  std::string metric;  // "<group>.<predicted_share|col_error>.<class>"
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double range = 0.0;
  bool flagged = false;

  friend bool operator==(const MetricDispersion&, const MetricDispersion&) = default;
};

struct RobustnessCell {
  std::size_t config_index = 0;
  std::vector<MetricDispersion> metrics;

  friend bool operator==(const RobustnessCell&, const RobustnessCell&) = default;
};

struct RobustnessReport {
  double threshold = 0.05;
  std::vector<std::uint64_t> split_seeds;
  std::vector<RobustnessCell> cells;
  std::vector<std::string> flagged;  // "<config index>:<metric>"

  friend bool operator==(const RobustnessReport&, const RobustnessReport&) = default;
};

// For each config and split seed: split, train (optionally on one group),
// audit, and summarise per-metric dispersion across seeds. Throws kConfig
// for an empty grid or fewer than two seeds.
RobustnessReport RobustnessHarness(const Dataset& data, const RobustnessOptions& options);

// Conventional layout: observed rows, predicted columns, trailing
// classification-error column and prediction-error row, two decimals.
std::string ConfusionMarkdown(const ConfusionReport& report,
                              const std::vector<std::string>& class_names);
// Same layout as CSV at full precision.
std::string ConfusionCsv(const ConfusionReport& report,
                         const std::vector<std::string>& class_names);

}  // namespace fairboost
