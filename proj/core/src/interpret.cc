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

#include "fairboost/interpret.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fairboost/error.h"

namespace fairboost {
namespace {

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ImportanceReport Importance(const BoostModel& model) {
  if (model.rounds.empty()) throw Error(ErrorCode::kConfig, "importance needs at least one round");
  std::vector<double> gain(model.schema.size(), 0.0);
  for (const auto& round : model.rounds) {
    for (const Tree& tree : round) {
      for (const TreeNode& n : tree.nodes()) {
        if (!n.is_leaf()) gain[static_cast<std::size_t>(n.feature)] += n.gain;
      }
    }
  }
  const double rounds = static_cast<double>(model.rounds.size());
  double total = 0.0;
  for (double& g : gain) {
    g /= rounds;
    total += g;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateImportance, "model has no splits; importance is undefined");
  }
  ImportanceReport report;
  for (std::size_t f = 0; f < gain.size(); ++f) {
    report.features.push_back({model.schema.feature(f).name, 100.0 * gain[f] / total});
  }
  return report;
}

std::string BinningRule::Describe() const {
  switch (kind) {
    case Kind::kAuto: return "auto(max_bins=" + std::to_string(bins) + ")";
    case Kind::kSpacing: return "spacing(step=" + Num(spacing) + ",origin=" + Num(origin) + ")";
    case Kind::kEqualWidth: return "equal_width(bins=" + std::to_string(bins) + ")";
    case Kind::kExplicit: return "explicit(n=" + std::to_string(values.size()) + ")";
  }
  return "auto";
}

std::vector<double> BinValues(const Dataset& data, std::size_t feature, const BinningRule& rule) {
  if (data.empty()) throw Error(ErrorCode::kEmptySelection, "binning needs reference rows");
  double lo = data.feature(0, feature), hi = lo;
  for (std::size_t i = 1; i < data.n_rows(); ++i) {
    lo = std::min(lo, data.feature(i, feature));
    hi = std::max(hi, data.feature(i, feature));
  }
  auto equal_width = [&](int bins) {
    if (bins < 1) throw Error(ErrorCode::kConfig, "bin count must be positive");
    std::vector<double> v;
    if (hi == lo || bins == 1) return std::vector<double>{lo};
    for (int b = 0; b < bins; ++b) {
      v.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins - 1));
    }
    return v;
  };
  auto spaced = [&](double origin, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::kConfig, "bin spacing must be positive");
    std::vector<double> v;
    for (long long b = 0;; ++b) {
      const double x = origin + step * static_cast<double>(b);
      if (x > hi) break;
      v.push_back(x);
    }
    if (v.empty()) v.push_back(origin);
    return v;
  };
  switch (rule.kind) {
    case BinningRule::Kind::kSpacing:
      return spaced(rule.origin, rule.spacing);
    case BinningRule::Kind::kEqualWidth:
      return equal_width(rule.bins);
    case BinningRule::Kind::kExplicit: {
      std::vector<double> v = rule.values;
      if (v.empty()) throw Error(ErrorCode::kConfig, "explicit bins are empty");
      for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) throw Error(ErrorCode::kConfig, "explicit bins must increase");
      }
      return v;
    }
    case BinningRule::Kind::kAuto:
      break;
  }
  const FeatureKind kind = data.schema().feature(feature).kind;
  if (kind == FeatureKind::kBinary) return {0.0, 1.0};
  if (kind == FeatureKind::kCount) {
    const int cap = std::max(rule.bins, 2);
    const double span = hi - lo;
    const double step = std::max(1.0, std::ceil(span / static_cast<double>(cap - 1)));
    return spaced(lo, step);
  }
  return equal_width(rule.bins);
}

PdpCurve PartialDependence(const BoostModel& model, const Dataset& data,
                           const std::string& feature, const BinningRule& bins, int target_class) {
  if (data.empty()) throw Error(ErrorCode::kEmptySelection, "partial dependence needs reference rows");
  model.CheckSchema(data.schema());
  if (target_class < 0 || target_class >= model.n_classes()) {
    throw Error(ErrorCode::kLabel, "target class out of range");
  }
  const std::size_t f = data.schema().Require(feature);
  const std::vector<double> grid = BinValues(data, f, bins);

  std::vector<double> sums(grid.size(), 0.0);
  std::vector<double> x(data.n_features());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const auto row = data.row(i);
    std::copy(row.begin(), row.end(), x.begin());
    for (std::size_t b = 0; b < grid.size(); ++b) {
      x[f] = grid[b];
      sums[b] += model.PredictProba(x)[static_cast<std::size_t>(target_class)];
    }
  }

  PdpCurve curve;
  curve.feature = feature;
  curve.target_class = target_class;
  curve.binning = bins.Describe();
  curve.data_fingerprint = data.Fingerprint();
  const double n = static_cast<double>(data.n_rows());
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const double p = sums[b] / n;
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(ErrorCode::kLogitOverflow, "mean probability " + Num(p) + " at bin value " + Num(grid[b]));
    }
    curve.points.push_back({grid[b], p, std::log(p / (1.0 - p))});
  }
  return curve;
}

std::string ImportanceCsv(const ImportanceReport& report) {
  std::ostringstream os;
  os << "feature,share_percent\n";
  for (const auto& f : report.features) os << f.name << ',' << Num(f.share) << '\n';
  return os.str();
}

std::string PdpCsv(const PdpCurve& curve) {
  std::ostringstream os;
  os << "feature,class,value,mean_probability,logit\n";
  for (const auto& p : curve.points) {
    os << curve.feature << ',' << curve.target_class << ',' << Num(p.value) << ','
       << Num(p.mean_probability) << ',' << Num(p.logit) << '\n';
  }
  return os.str();
}

}  // namespace fairboost
