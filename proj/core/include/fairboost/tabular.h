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

// Tabular data: schema with policy flags, immutable weighted datasets,
// predictor exclusion, equal random splits and group filtering.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairboost {

enum class FeatureKind { kCount, kYears, kBinary, kCategory };

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

// Policy flags attached to features. They drive predictor exclusion and
// the feature selectors used by test-time transforms.
enum class FeatureFlag : std::uint8_t {
  kDiscretionaryPrior = 1 << 0,
  kJuvenilePrior = 1 << 1,
  kSeriousPrior = 1 << 2,
  kInstantCharge = 1 << 3,
  kBiographical = 1 << 4,
};

inline constexpr FeatureFlag kAllFeatureFlags[] = {
    FeatureFlag::kDiscretionaryPrior, FeatureFlag::kJuvenilePrior,
    FeatureFlag::kSeriousPrior, FeatureFlag::kInstantCharge,
    FeatureFlag::kBiographical};

std::string_view FeatureFlagName(FeatureFlag flag);
FeatureFlag ParseFeatureFlag(std::string_view name);

class FlagSet {
 public:
  constexpr FlagSet() = default;
  constexpr FlagSet(std::initializer_list<FeatureFlag> flags) {
    for (FeatureFlag f : flags) bits_ |= static_cast<std::uint8_t>(f);
  }

  static FlagSet FromNames(const std::vector<std::string>& names);
  std::vector<std::string> Names() const;

  constexpr bool contains(FeatureFlag f) const {
    return (bits_ & static_cast<std::uint8_t>(f)) != 0;
  }
  constexpr bool intersects(FlagSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr void insert(FeatureFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(FlagSet, FlagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kCount;
  FlagSet flags;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

class Schema {
 public:
  Schema() = default;
  // Throws kSchema on empty or duplicate names.
  explicit Schema(std::vector<FeatureSpec> features);

  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  const FeatureSpec& feature(std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  // Like IndexOf, but throws kSchema naming the missing feature.
  std::size_t Require(std::string_view name) const;

  // Stable 64-bit FNV-1a digest (hex) of names, kinds and flags.
  std::string Fingerprint() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<FeatureSpec> features_;
};

// Immutable weighted dataset. Features are stored row-major. The group tag
// is metadata and never part of the feature vector.
class Dataset {
 public:
  Dataset() = default;

  // Validates every invariant; throws kSchema/kLabel/kNumeric/kSize.
  // Empty row_ids default to 0..n-1; empty class_names to "0".."K-1".
  Dataset(Schema schema, int n_classes, std::vector<double> features,
          std::vector<int> labels, std::vector<std::string> groups,
          std::vector<double> weights, std::vector<std::uint64_t> row_ids = {},
          std::vector<std::string> class_names = {});

  const Schema& schema() const { return schema_; }
  std::size_t n_rows() const { return labels_.size(); }
  std::size_t n_features() const { return schema_.size(); }
  int n_classes() const { return n_classes_; }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * n_features(), n_features()};
  }
  double feature(std::size_t i, std::size_t f) const { return features_[i * n_features() + f]; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::string& group(std::size_t i) const { return groups_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::uint64_t row_id(std::size_t i) const { return row_ids_[i]; }

  std::span<const double> features() const { return features_; }
  std::span<const int> labels() const { return labels_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const std::uint64_t> row_ids() const { return row_ids_; }
  const std::vector<std::string>& groups() const { return groups_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  // Sorted distinct group ids.
  std::vector<std::string> DistinctGroups() const;
  double TotalWeight() const;
  std::vector<double> ClassWeightTotals() const;

  // Rows at the given positions, in the given order.
  Dataset Select(std::span<const std::size_t> positions) const;
  Dataset WithWeights(std::vector<double> weights) const;
  Dataset WithFeatures(std::vector<double> features) const;

  // Digest over schema, rows, labels, groups and weights (hex).
  std::string Fingerprint() const;
  // Digest over the sorted row-id set only (hex).
  std::string RowIdFingerprint() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Schema schema_;
  int n_classes_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
  std::vector<std::string> groups_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> row_ids_;
  std::vector<std::string> class_names_;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

// Drops every feature carrying any of drop_flags, identically for all rows
// and groups. Throws kSchema when nothing would remain.
Dataset ApplyExclusions(const Dataset& data, FlagSet drop_flags);

// Uniform random partition into halves; with odd n the extra row goes to
// test. Rows keep their source order within each half. Throws kSize for n<2.
SplitPair SplitEqual(const Dataset& data, std::uint64_t seed);

// Rows whose group equals `group`. Throws kEmptySelection when none match.
Dataset FilterGroup(const Dataset& data, std::string_view group);

// 64-bit FNV-1a, exposed for fingerprints elsewhere in the library.
class Fnv1a {
 public:
  void Update(const void* data, std::size_t size);
  void Update(std::string_view s) { Update(s.data(), s.size()); }
  void UpdateU64(std::uint64_t v);
  void UpdateDouble(double v);
  std::uint64_t digest() const { return state_; }
  std::string HexDigest() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace fairboost
