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

#include "fairboost/tabular.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_set>

#include "fairboost/error.h"
#include "fairboost/rng.h"

namespace fairboost {

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kCount: return "count";
    case FeatureKind::kYears: return "years";
    case FeatureKind::kBinary: return "binary";
    case FeatureKind::kCategory: return "category";
  }
  return "count";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  if (name == "count") return FeatureKind::kCount;
  if (name == "years") return FeatureKind::kYears;
  if (name == "binary") return FeatureKind::kBinary;
  if (name == "category") return FeatureKind::kCategory;
  throw Error(ErrorCode::kSchema, "unknown feature kind '" + std::string(name) + "'");
}

std::string_view FeatureFlagName(FeatureFlag flag) {
  switch (flag) {
    case FeatureFlag::kDiscretionaryPrior: return "discretionary_prior";
    case FeatureFlag::kJuvenilePrior: return "juvenile_prior";
    case FeatureFlag::kSeriousPrior: return "serious_prior";
    case FeatureFlag::kInstantCharge: return "instant_charge";
    case FeatureFlag::kBiographical: return "biographical";
  }
  return "";
}

FeatureFlag ParseFeatureFlag(std::string_view name) {
  for (FeatureFlag f : kAllFeatureFlags) {
    if (FeatureFlagName(f) == name) return f;
  }
  throw Error(ErrorCode::kSchema, "unknown feature flag '" + std::string(name) + "'");
}

FlagSet FlagSet::FromNames(const std::vector<std::string>& names) {
  FlagSet out;
  for (const auto& n : names) out.insert(ParseFeatureFlag(n));
  return out;
}

std::vector<std::string> FlagSet::Names() const {
  std::vector<std::string> out;
  for (FeatureFlag f : kAllFeatureFlags) {
    if (contains(f)) out.emplace_back(FeatureFlagName(f));
  }
  return out;
}

Schema::Schema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  std::unordered_set<std::string> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) throw Error(ErrorCode::kSchema, "feature name must be nonempty");
    if (!seen.insert(f.name).second) {
      throw Error(ErrorCode::kSchema, "duplicate feature name '" + f.name + "'");
    }
  }
}

std::optional<std::size_t> Schema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::Require(std::string_view name) const {
  auto idx = IndexOf(name);
  if (!idx) throw Error(ErrorCode::kSchema, "unknown feature '" + std::string(name) + "'");
  return *idx;
}

std::string Schema::Fingerprint() const {
  Fnv1a h;
  for (const auto& f : features_) {
    h.Update(f.name);
    h.Update(":");
    h.Update(FeatureKindName(f.kind));
    h.Update(":");
    h.UpdateU64(f.flags.bits());
    h.Update(";");
  }
  return h.HexDigest();
}

Dataset::Dataset(Schema schema, int n_classes, std::vector<double> features,
                 std::vector<int> labels, std::vector<std::string> groups,
                 std::vector<double> weights, std::vector<std::uint64_t> row_ids,
                 std::vector<std::string> class_names)
    : schema_(std::move(schema)),
      n_classes_(n_classes),
      features_(std::move(features)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      weights_(std::move(weights)),
      row_ids_(std::move(row_ids)),
      class_names_(std::move(class_names)) {
  const std::size_t n = labels_.size();
  if (schema_.empty()) throw Error(ErrorCode::kSchema, "dataset schema has no features");
  if (n_classes_ < 2) throw Error(ErrorCode::kLabel, "dataset needs at least 2 classes");
  if (features_.size() != n * schema_.size()) {
    throw Error(ErrorCode::kSchema, "feature storage does not match rows x schema width");
  }
  if (groups_.size() != n || weights_.size() != n) {
    throw Error(ErrorCode::kSize, "labels, groups and weights must have equal lengths");
  }
  if (row_ids_.empty()) {
    row_ids_.resize(n);
    std::iota(row_ids_.begin(), row_ids_.end(), std::uint64_t{0});
  } else if (row_ids_.size() != n) {
    throw Error(ErrorCode::kSize, "row id count does not match rows");
  }
  if (class_names_.empty()) {
    for (int k = 0; k < n_classes_; ++k) class_names_.push_back(std::to_string(k));
  } else if (static_cast<int>(class_names_.size()) != n_classes_) {
    throw Error(ErrorCode::kLabel, "class name count does not match number of classes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] < 0 || labels_[i] >= n_classes_) {
      throw Error(ErrorCode::kLabel, "row " + std::to_string(i) + " label " +
                                         std::to_string(labels_[i]) + " out of range");
    }
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw Error(ErrorCode::kNumeric, "row " + std::to_string(i) + " has invalid weight");
    }
    any_positive = any_positive || weights_[i] > 0.0;
  }
  if (n > 0 && !any_positive) {
    throw Error(ErrorCode::kNumeric, "at least one row must have positive weight");
  }
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (!std::isfinite(features_[j])) {
      throw Error(ErrorCode::kNumeric, "row " + std::to_string(j / schema_.size()) +
                                           " feature '" + schema_.feature(j % schema_.size()).name +
                                           "' is not finite");
    }
  }
}

std::vector<std::string> Dataset::DistinctGroups() const {
  std::set<std::string> s(groups_.begin(), groups_.end());
  return {s.begin(), s.end()};
}

double Dataset::TotalWeight() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

std::vector<double> Dataset::ClassWeightTotals() const {
  std::vector<double> totals(static_cast<std::size_t>(n_classes_), 0.0);
  for (std::size_t i = 0; i < n_rows(); ++i) totals[static_cast<std::size_t>(labels_[i])] += weights_[i];
  return totals;
}

Dataset Dataset::Select(std::span<const std::size_t> positions) const {
  const std::size_t nf = n_features();
  std::vector<double> feats;
  feats.reserve(positions.size() * nf);
  std::vector<int> labels;
  std::vector<std::string> groups;
  std::vector<double> weights;
  std::vector<std::uint64_t> ids;
  labels.reserve(positions.size());
  groups.reserve(positions.size());
  weights.reserve(positions.size());
  ids.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= n_rows()) throw Error(ErrorCode::kSize, "row position out of range");
    auto r = row(p);
    feats.insert(feats.end(), r.begin(), r.end());
    labels.push_back(labels_[p]);
    groups.push_back(groups_[p]);
    weights.push_back(weights_[p]);
    ids.push_back(row_ids_[p]);
  }
  Dataset out;
  out.schema_ = schema_;
  out.n_classes_ = n_classes_;
  out.features_ = std::move(feats);
  out.labels_ = std::move(labels);
  out.groups_ = std::move(groups);
  out.weights_ = std::move(weights);
  out.row_ids_ = std::move(ids);
  out.class_names_ = class_names_;
  return out;
}

Dataset Dataset::WithWeights(std::vector<double> weights) const {
  return Dataset(schema_, n_classes_, features_, labels_, groups_, std::move(weights), row_ids_,
                 class_names_);
}

Dataset Dataset::WithFeatures(std::vector<double> features) const {
  return Dataset(schema_, n_classes_, std::move(features), labels_, groups_, weights_, row_ids_,
                 class_names_);
}

std::string Dataset::Fingerprint() const {
  Fnv1a h;
  h.Update(schema_.Fingerprint());
  h.UpdateU64(static_cast<std::uint64_t>(n_classes_));
  h.UpdateU64(n_rows());
  for (double v : features_) h.UpdateDouble(v);
  for (std::size_t i = 0; i < n_rows(); ++i) {
    h.UpdateU64(static_cast<std::uint64_t>(labels_[i]));
    h.Update(groups_[i]);
    h.Update("\x1f");
    h.UpdateDouble(weights_[i]);
  }
  return h.HexDigest();
}

std::string Dataset::RowIdFingerprint() const {
  std::vector<std::uint64_t> ids = row_ids_;
  std::sort(ids.begin(), ids.end());
  Fnv1a h;
  for (auto id : ids) h.UpdateU64(id);
  return h.HexDigest();
}

Dataset ApplyExclusions(const Dataset& data, FlagSet drop_flags) {
  if (drop_flags.empty()) return data;
  std::vector<std::size_t> keep;
  std::vector<FeatureSpec> kept_specs;
  for (std::size_t f = 0; f < data.n_features(); ++f) {
    const auto& spec = data.schema().feature(f);
    if (!spec.flags.intersects(drop_flags)) {
      keep.push_back(f);
      kept_specs.push_back(spec);
    }
  }
  if (keep.empty()) {
    throw Error(ErrorCode::kSchema, "exclusions would drop every feature");
  }
  std::vector<double> feats;
  feats.reserve(data.n_rows() * keep.size());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t f : keep) feats.push_back(data.feature(i, f));
  }
  std::vector<double> weights(data.weights().begin(), data.weights().end());
  return Dataset(Schema(std::move(kept_specs)), data.n_classes(), std::move(feats),
                 {data.labels().begin(), data.labels().end()}, data.groups(),
                 std::move(weights), {data.row_ids().begin(), data.row_ids().end()},
                 data.class_names());
}

SplitPair SplitEqual(const Dataset& data, std::uint64_t seed) {
  const std::size_t n = data.n_rows();
  if (n < 2) throw Error(ErrorCode::kSize, "split needs at least 2 rows, got " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng.UniformInt(i + 1));
    std::swap(perm[i], perm[j]);
  }
  const std::size_t n_train = n / 2;
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return SplitPair{data.Select(train), data.Select(test), seed};
}

Dataset FilterGroup(const Dataset& data, std::string_view group) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    if (data.group(i) == group) rows.push_back(i);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no rows with group '" + std::string(group) + "'");
  }
  return data.Select(rows);
}

void Fnv1a::Update(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::UpdateU64(std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  Update(bytes, 8);
}

void Fnv1a::UpdateDouble(double v) { UpdateU64(std::bit_cast<std::uint64_t>(v)); }

std::string Fnv1a::HexDigest() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace fairboost
