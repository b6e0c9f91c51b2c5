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

#include "fairboost/audit.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "fairboost/error.h"
#include "fairboost/rng.h"

namespace fairboost {
namespace {

std::size_t Idx(int k) { return static_cast<std::size_t>(k); }

void FillDerived(ConfusionReport& r) {
  const std::size_t k_count = Idx(r.n_classes);
  r.row_errors.assign(k_count, std::nullopt);
  r.col_errors.assign(k_count, std::nullopt);
  r.predicted_shares.assign(k_count, 0.0);
  r.observed_shares.assign(k_count, 0.0);
  std::vector<double> row_sum(k_count, 0.0), col_sum(k_count, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < k_count; ++i) {
    for (std::size_t j = 0; j < k_count; ++j) {
      row_sum[i] += r.counts[i][j];
      col_sum[j] += r.counts[i][j];
      total += r.counts[i][j];
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kNumeric, "confusion table has zero total weight");
  r.n = total;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (row_sum[k] > 0.0) r.row_errors[k] = (row_sum[k] - r.counts[k][k]) / row_sum[k];
    if (col_sum[k] > 0.0) r.col_errors[k] = (col_sum[k] - r.counts[k][k]) / col_sum[k];
    r.predicted_shares[k] = col_sum[k] / total;
    r.observed_shares[k] = row_sum[k] / total;
  }
}

std::string FormatFull(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatTwo(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

std::string FormatCount(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double Quantile(std::vector<double> sorted, double q) {
  // Linear interpolation between order statistics (Hyndman-Fan type 7).
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ConfusionReport Confusion(std::span<const int> labels, std::span<const int> predictions,
                          std::span<const double> weights, int n_classes,
                          const std::string& group) {
  if (labels.size() != predictions.size() || (!weights.empty() && weights.size() != labels.size())) {
    throw Error(ErrorCode::kSize, "labels, predictions and weights must have equal lengths");
  }
  if (n_classes < 2) throw Error(ErrorCode::kConfig, "need at least 2 classes");
  ConfusionReport r;
  r.group = group;
  r.n_classes = n_classes;
  r.counts.assign(Idx(n_classes), std::vector<double>(Idx(n_classes), 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes || predictions[i] < 0 || predictions[i] >= n_classes) {
      throw Error(ErrorCode::kLabel, "class index out of range at position " + std::to_string(i));
    }
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0)) throw Error(ErrorCode::kNumeric, "negative weight at position " + std::to_string(i));
    r.counts[Idx(labels[i])][Idx(predictions[i])] += w;
  }
  FillDerived(r);
  return r;
}

ConfusionReport ConfusionFromCounts(const std::vector<std::vector<double>>& counts,
                                    const std::string& group) {
  const std::size_t k_count = counts.size();
  if (k_count < 2) throw Error(ErrorCode::kConfig, "need at least 2 classes");
  for (const auto& row : counts) {
    if (row.size() != k_count) throw Error(ErrorCode::kSize, "count matrix must be square");
    for (double v : row) {
      if (!(v >= 0.0)) throw Error(ErrorCode::kNumeric, "counts must be nonnegative");
    }
  }
  ConfusionReport r;
  r.group = group;
  r.n_classes = static_cast<int>(k_count);
  r.counts = counts;
  FillDerived(r);
  return r;
}

GroupDisparity Disparity(const ConfusionReport& a, const ConfusionReport& b) {
  if (a.n_classes != b.n_classes) {
    throw Error(ErrorCode::kIncompatible, "reports have different numbers of classes");
  }
  GroupDisparity d{a.group, b.group, {}, {}};
  for (std::size_t k = 0; k < Idx(a.n_classes); ++k) {
    d.predicted_share_diff.push_back(a.predicted_shares[k] - b.predicted_shares[k]);
    if (a.col_errors[k] && b.col_errors[k]) {
      d.col_error_diff.emplace_back(*a.col_errors[k] - *b.col_errors[k]);
    } else {
      d.col_error_diff.emplace_back(std::nullopt);
    }
  }
  return d;
}

AuditBundle AuditPredictions(std::span<const int> labels, std::span<const int> predictions,
                             std::span<const double> weights,
                             const std::vector<std::string>& groups, int n_classes) {
  if (labels.empty()) throw Error(ErrorCode::kEmptySelection, "cannot audit an empty test set");
  if (groups.size() != labels.size()) throw Error(ErrorCode::kSize, "group tags do not match rows");
  AuditBundle bundle;
  std::set<std::string> distinct(groups.begin(), groups.end());
  bundle.reports.emplace(kAllGroups, Confusion(labels, predictions, weights, n_classes, kAllGroups));
  for (const auto& g : distinct) {
    if (g == kAllGroups) {
      throw Error(ErrorCode::kConfig, "group id 'all' is reserved for the pooled report");
    }
    std::vector<int> l, p;
    std::vector<double> w;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (groups[i] != g) continue;
      l.push_back(labels[i]);
      p.push_back(predictions[i]);
      w.push_back(weights.empty() ? 1.0 : weights[i]);
    }
    bundle.reports.emplace(g, Confusion(l, p, w, n_classes, g));
  }
  for (auto a = distinct.begin(); a != distinct.end(); ++a) {
    for (auto b = std::next(a); b != distinct.end(); ++b) {
      bundle.disparities.push_back(Disparity(bundle.reports.at(*a), bundle.reports.at(*b)));
    }
  }
  for (int k = 0; k < n_classes; ++k) bundle.class_names.push_back(std::to_string(k));
  return bundle;
}

AuditBundle AuditByGroup(const BoostModel& model, const Dataset& test) {
  if (test.empty()) throw Error(ErrorCode::kEmptySelection, "cannot audit an empty test set");
  const std::vector<int> preds = model.PredictClasses(test);
  AuditBundle bundle =
      AuditPredictions(test.labels(), preds, test.weights(), test.groups(), test.n_classes());
  bundle.training_group = model.training_group;
  bundle.class_names = test.class_names();
  bundle.model_schema_fingerprint = model.schema.Fingerprint();
  bundle.test_rows_fingerprint = test.RowIdFingerprint();
  return bundle;
}

std::string_view BaselineKindName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kMajorityClass: return "majority_class";
    case BaselineKind::kReleaseAll: return "release_all";
    case BaselineKind::kReleaseNone: return "release_none";
    case BaselineKind::kCoinFlip: return "coin_flip";
  }
  return "majority_class";
}

BaselineKind ParseBaselineKind(std::string_view name) {
  for (auto k : {BaselineKind::kMajorityClass, BaselineKind::kReleaseAll,
                 BaselineKind::kReleaseNone, BaselineKind::kCoinFlip}) {
    if (BaselineKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kConfig, "unknown baseline policy '" + std::string(name) + "'");
}

ConfusionReport ApplyBaselinePolicy(const BaselinePolicy& policy, std::span<const int> labels,
                                    int n_classes, std::span<const double> weights) {
  if (labels.empty()) throw Error(ErrorCode::kEmptySelection, "baseline needs at least one label");
  std::vector<int> preds(labels.size());
  switch (policy.kind) {
    case BaselineKind::kMajorityClass: {
      std::vector<double> totals(Idx(n_classes), 0.0);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) throw Error(ErrorCode::kLabel, "label out of range");
        totals[Idx(labels[i])] += weights.empty() ? 1.0 : weights[i];
      }
      std::fill(preds.begin(), preds.end(), ArgMax(totals));
      break;
    }
    case BaselineKind::kReleaseAll:
      std::fill(preds.begin(), preds.end(), 0);
      break;
    case BaselineKind::kReleaseNone:
      std::fill(preds.begin(), preds.end(), n_classes - 1);
      break;
    case BaselineKind::kCoinFlip: {
      Rng rng(policy.seed);
      for (int& p : preds) p = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(n_classes)));
      break;
    }
  }
  return Confusion(labels, preds, weights, n_classes);
}

MetricSelector MetricSelector::Parse(std::string_view text) {
  MetricSelector sel;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kConfig, "metric selector '" + std::string(text) + "' lacks ':<class>'");
  }
  const std::string_view metric = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  if (metric == "predicted_share") {
    sel.metric = Metric::kPredictedShare;
  } else if (metric == "col_error") {
    sel.metric = Metric::kColError;
  } else if (metric == "row_error") {
    sel.metric = Metric::kRowError;
  } else {
    throw Error(ErrorCode::kConfig, "unknown metric '" + std::string(metric) + "'");
  }
  const auto at = rest.find('@');
  const std::string_view cls = rest.substr(0, at);
  if (at != std::string_view::npos) sel.group = std::string(rest.substr(at + 1));
  auto res = std::from_chars(cls.data(), cls.data() + cls.size(), sel.cls);
  if (res.ec != std::errc() || res.ptr != cls.data() + cls.size() || sel.cls < 0) {
    throw Error(ErrorCode::kConfig, "bad class index in selector '" + std::string(text) + "'");
  }
  return sel;
}

std::string MetricSelector::ToString() const {
  std::string m = metric == Metric::kPredictedShare ? "predicted_share"
                  : metric == Metric::kColError     ? "col_error"
                                                    : "row_error";
  return m + ":" + std::to_string(cls) + "@" + group;
}

std::optional<double> EvaluateMetric(const ConfusionReport& report, const MetricSelector& sel) {
  if (sel.cls < 0 || sel.cls >= report.n_classes) {
    throw Error(ErrorCode::kLabel, "metric class out of range");
  }
  switch (sel.metric) {
    case MetricSelector::Metric::kPredictedShare: return report.predicted_shares[Idx(sel.cls)];
    case MetricSelector::Metric::kColError: return report.col_errors[Idx(sel.cls)];
    case MetricSelector::Metric::kRowError: return report.row_errors[Idx(sel.cls)];
  }
  return std::nullopt;
}

BootstrapResult BootstrapCi(std::span<const int> labels, std::span<const int> predictions,
                            std::span<const double> weights,
                            const std::vector<std::string>& groups, int n_classes,
                            const MetricSelector& statistic, int replicates, double level,
                            std::uint64_t seed) {
  if (replicates < 100) throw Error(ErrorCode::kConfig, "bootstrap needs at least 100 replicates");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kConfig, "level must be in (0,1)");
  if (labels.size() != predictions.size() || groups.size() != labels.size() ||
      (!weights.empty() && weights.size() != labels.size())) {
    throw Error(ErrorCode::kSize, "bootstrap inputs have mismatched lengths");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (statistic.group == kAllGroups || groups[i] == statistic.group) rows.push_back(i);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no rows for group '" + statistic.group + "'");
  }
  const std::size_t m = rows.size();
  const std::size_t k_count = Idx(n_classes);

  auto stat_of = [&](const std::vector<std::size_t>& picks) -> std::optional<double> {
    std::vector<std::vector<double>> counts(k_count, std::vector<double>(k_count, 0.0));
    double total = 0.0;
    for (std::size_t i : picks) {
      const double w = weights.empty() ? 1.0 : weights[i];
      counts[Idx(labels[i])][Idx(predictions[i])] += w;
      total += w;
    }
    if (!(total > 0.0)) return std::nullopt;
    return EvaluateMetric(ConfusionFromCounts(counts), statistic);
  };

  BootstrapResult result;
  result.statistic = statistic;
  result.level = level;
  result.replicates = replicates;
  result.seed = seed;
  const auto point = stat_of(rows);
  if (!point) throw Error(ErrorCode::kNumeric, "statistic undefined on the original sample");
  result.point = *point;

  constexpr int kMaxRedrawsPerReplicate = 1000;
  std::vector<double> values;
  values.reserve(Idx(replicates));
  std::vector<std::size_t> picks(m);
  for (int b = 0; b < replicates; ++b) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(b)));
    for (int attempt = 0;; ++attempt) {
      if (attempt > kMaxRedrawsPerReplicate) {
        throw Error(ErrorCode::kNumeric, "statistic undefined on too many resamples");
      }
      for (std::size_t j = 0; j < m; ++j) picks[j] = rows[rng.UniformInt(m)];
      if (auto v = stat_of(picks)) {
        values.push_back(*v);
        break;
      }
      ++result.redraws;
    }
  }
  std::sort(values.begin(), values.end());
  const double alpha = 1.0 - level;
  result.lower = Quantile(values, alpha / 2.0);
  result.upper = Quantile(values, 1.0 - alpha / 2.0);
  return result;
}

BootstrapResult BootstrapCi(const Dataset& test, const BoostModel& model,
                            const MetricSelector& statistic, int replicates, double level,
                            std::uint64_t seed) {
  const std::vector<int> preds = model.PredictClasses(test);
  return BootstrapCi(test.labels(), preds, test.weights(), test.groups(), test.n_classes(),
                     statistic, replicates, level, seed);
}

RobustnessReport RobustnessHarness(const Dataset& data, const RobustnessOptions& options) {
  if (options.grid.empty()) throw Error(ErrorCode::kConfig, "robustness grid is empty");
  if (options.split_seeds.size() < 2) {
    throw Error(ErrorCode::kConfig, "robustness harness needs at least 2 split seeds");
  }
  RobustnessReport report;
  report.threshold = options.threshold;
  report.split_seeds = options.split_seeds;
  for (std::size_t c = 0; c < options.grid.size(); ++c) {
    std::map<std::string, std::vector<double>> series;
    for (std::uint64_t seed : options.split_seeds) {
      SplitPair split = SplitEqual(data, seed);
      GbmConfig cfg = options.grid[c];
      cfg.seed = MixSeed(cfg.seed, seed);
      Dataset train = options.training_group ? FilterGroup(split.train, *options.training_group)
                                             : split.train;
      if (!options.class_weights.empty()) {
        if (options.class_weights.size() != Idx(train.n_classes())) {
          throw Error(ErrorCode::kConfig, "robustness class weights need one entry per class");
        }
        std::vector<double> w(train.weights().begin(), train.weights().end());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= options.class_weights[Idx(train.label(i))];
        train = train.WithWeights(std::move(w));
      }
      BoostModel model = Train(train, cfg);
      model.training_group = options.training_group;
      const AuditBundle audit = AuditByGroup(model, split.test);
      for (const auto& [group, r] : audit.reports) {
        for (std::size_t k = 0; k < Idx(r.n_classes); ++k) {
          series[group + ".predicted_share." + std::to_string(k)].push_back(r.predicted_shares[k]);
          if (r.col_errors[k]) {
            series[group + ".col_error." + std::to_string(k)].push_back(*r.col_errors[k]);
          }
        }
      }
    }
    RobustnessCell cell;
    cell.config_index = c;
    for (auto& [name, values] : series) {
      MetricDispersion d;
      d.metric = name;
      d.values = values;
      d.min = *std::min_element(values.begin(), values.end());
      d.max = *std::max_element(values.begin(), values.end());
      d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - d.mean) * (v - d.mean);
      d.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
      d.range = d.max - d.min;
      d.flagged = d.range > options.threshold;
      if (d.flagged) report.flagged.push_back(std::to_string(c) + ":" + name);
      cell.metrics.push_back(std::move(d));
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::string ConfusionMarkdown(const ConfusionReport& report,
                              const std::vector<std::string>& class_names) {
  const std::size_t k_count = Idx(report.n_classes);
  auto name = [&](std::size_t k) {
    return k < class_names.size() ? class_names[k] : std::to_string(k);
  };
  std::ostringstream os;
  os << "| Observed \\ Predicted |";
  for (std::size_t k = 0; k < k_count; ++k) os << ' ' << name(k) << " |";
  os << " Classification Error |\n|---|";
  for (std::size_t k = 0; k <= k_count; ++k) os << "---|";
  os << '\n';
  for (std::size_t i = 0; i < k_count; ++i) {
    os << "| " << name(i) << " |";
    for (std::size_t j = 0; j < k_count; ++j) os << ' ' << FormatCount(report.counts[i][j]) << " |";
    os << ' ' << FormatTwo(report.row_errors[i]) << " |\n";
  }
  os << "| Prediction Error |";
  for (std::size_t j = 0; j < k_count; ++j) os << ' ' << FormatTwo(report.col_errors[j]) << " |";
  os << " |\n| Predicted Share |";
  for (std::size_t j = 0; j < k_count; ++j) os << ' ' << FormatTwo(report.predicted_shares[j]) << " |";
  os << " |\n";
  return os.str();
}

std::string ConfusionCsv(const ConfusionReport& report,
                         const std::vector<std::string>& class_names) {
  const std::size_t k_count = Idx(report.n_classes);
  auto name = [&](std::size_t k) {
    return k < class_names.size() ? class_names[k] : std::to_string(k);
  };
  auto opt = [](const std::optional<double>& v) { return v ? FormatFull(*v) : std::string(); };
  std::ostringstream os;
  os << "observed";
  for (std::size_t k = 0; k < k_count; ++k) os << ',' << name(k);
  os << ",classification_error\n";
  for (std::size_t i = 0; i < k_count; ++i) {
    os << name(i);
    for (std::size_t j = 0; j < k_count; ++j) os << ',' << FormatFull(report.counts[i][j]);
    os << ',' << opt(report.row_errors[i]) << '\n';
  }
  os << "prediction_error";
  for (std::size_t j = 0; j < k_count; ++j) os << ',' << opt(report.col_errors[j]);
  os << ",\npredicted_share";
  for (std::size_t j = 0; j < k_count; ++j) os << ',' << FormatFull(report.predicted_shares[j]);
  os << ",\n";
  return os.str();
}

}  // namespace fairboost
