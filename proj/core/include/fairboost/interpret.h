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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairboost/gbm.h"
#include "fairboost/tabular.h"

namespace fairboost {

struct FeatureImportance {
  std::string name;
  double share = 0.0;  // percent

  friend bool operator==(const FeatureImportance&, const FeatureImportance&) = default;
};

struct ImportanceReport {
  std::vector<FeatureImportance> features;  // schema order

  friend bool operator==(const ImportanceReport&, const ImportanceReport&) = default;
};

// Split gain credited to the split feature, summed over the K trees of a
// round, averaged over rounds, normalised to 100. Throws kConfig for a
// 0-round model and kDegenerateImportance when no tree has a split.
ImportanceReport Importance(const BoostModel& model);

struct BinningRule {
  enum class Kind { kAuto, kSpacing, kEqualWidth, kExplicit };
  Kind kind = Kind::kAuto;
  double spacing = 1.0;  // kSpacing
  double origin = 0.0;   // kSpacing
  int bins = 40;         // kEqualWidth, and the cap used by kAuto
  std::vector<double> values;  // kExplicit

  static BinningRule Spacing(double step, double origin = 0.0) {
    BinningRule r;
    r.kind = Kind::kSpacing;
    r.spacing = step;
    r.origin = origin;
    return r;
  }
  static BinningRule EqualWidth(int bins) {
    BinningRule r;
    r.kind = Kind::kEqualWidth;
    r.bins = bins;
    return r;
  }
  static BinningRule Explicit(std::vector<double> values) {
    BinningRule r;
    r.kind = Kind::kExplicit;
    r.values = std::move(values);
    return r;
  }

  std::string Describe() const;
  friend bool operator==(const BinningRule&, const BinningRule&) = default;
};

// Grid values for one feature of data. Auto: count features get an integer
// spacing from the observed minimum so there are at most `bins` points;
// binary features {0, 1}; everything else `bins` equal-width points over the
// observed range.
std::vector<double> BinValues(const Dataset& data, std::size_t feature, const BinningRule& rule);

inline constexpr char kLogitConvention[] = "one_vs_rest_log_odds_of_mean_probability";

struct PdpPoint {
  double value = 0.0;
  double mean_probability = 0.0;
  double logit = 0.0;

  friend bool operator==(const PdpPoint&, const PdpPoint&) = default;
};

struct PdpCurve {
  std::string feature;
  int target_class = 0;
  std::vector<PdpPoint> points;
  std::string binning;
  std::string logit_convention = kLogitConvention;
  std::string data_fingerprint;

  friend bool operator==(const PdpCurve&, const PdpCurve&) = default;
};

// For every grid value v: set the feature to v in every reference row,
// average the predicted probability of target_class over rows (unweighted),
// and report log(p / (1 - p)). Throws kSchema for an unknown feature,
// kEmptySelection for empty data and kLogitOverflow when p is exactly 0 or 1.
PdpCurve PartialDependence(const BoostModel& model, const Dataset& data,
                           const std::string& feature, const BinningRule& bins, int target_class);

std::string ImportanceCsv(const ImportanceReport& report);
std::string PdpCsv(const PdpCurve& curve);

}  // namespace fairboost
