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

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "fairboost/error.h"
#include "fairboost/rng.h"
#include "fairboost/tabular.h"

namespace fairboost {
namespace {

Schema ThreeFeatures() {
  return Schema({{"age", FeatureKind::kYears, {FeatureFlag::kBiographical}},
                 {"juv", FeatureKind::kCount, {FeatureFlag::kJuvenilePrior}},
                 {"petty", FeatureKind::kCount, {FeatureFlag::kDiscretionaryPrior}}});
}

Dataset Small(std::size_t n) {
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::string> g;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    x.insert(x.end(), {20.0 + static_cast<double>(i), static_cast<double>(i % 3), static_cast<double>(i % 5)});
    y.push_back(static_cast<int>(i % 3));
    g.push_back(i % 4 == 0 ? "W" : "B");
    w.push_back(1.0 + static_cast<double>(i % 2));
  }
  return Dataset(ThreeFeatures(), 3, x, y, g, w);
}

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected fairboost::Error";
  return ErrorCode::kIo;
}

TEST(Fnv1aTest, KnownVectors) {
  EXPECT_EQ(Fnv1a().HexDigest(), "cbf29ce484222325");
  Fnv1a h;
  h.Update("a");
  EXPECT_EQ(h.HexDigest(), "af63dc4c8601ec8c");
  Fnv1a foobar;
  foobar.Update("foobar");
  EXPECT_EQ(foobar.HexDigest(), "85944171f73967e8");
}

TEST(SchemaTest, RejectsDuplicateAndEmptyNames) {
  EXPECT_EQ(CodeOf([] { Schema({{"a"}, {"a"}}); }), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf([] { Schema({{""}}); }), ErrorCode::kSchema);
  const Schema s = ThreeFeatures();
  EXPECT_EQ(s.IndexOf("juv"), 1u);
  EXPECT_FALSE(s.IndexOf("nope"));
  EXPECT_EQ(CodeOf([&] { s.Require("nope"); }), ErrorCode::kSchema);
}

TEST(SchemaTest, FingerprintTracksFlags) {
  Schema a = ThreeFeatures();
  Schema b({{"age", FeatureKind::kYears, {}},
            {"juv", FeatureKind::kCount, {FeatureFlag::kJuvenilePrior}},
            {"petty", FeatureKind::kCount, {FeatureFlag::kDiscretionaryPrior}}});
  EXPECT_NE(a.Fingerprint(), b.Fingerprint());
  EXPECT_EQ(a.Fingerprint(), ThreeFeatures().Fingerprint());
}

TEST(FlagSetTest, NamesRoundTrip) {
  FlagSet f{FeatureFlag::kJuvenilePrior, FeatureFlag::kInstantCharge};
  EXPECT_EQ(FlagSet::FromNames(f.Names()), f);
  for (FeatureFlag flag : kAllFeatureFlags) {
    EXPECT_EQ(ParseFeatureFlag(FeatureFlagName(flag)), flag);
  }
  EXPECT_EQ(CodeOf([] { ParseFeatureFlag("bogus"); }), ErrorCode::kSchema);
}

TEST(DatasetTest, ValidatesInvariants) {
  const Schema s = ThreeFeatures();
  EXPECT_EQ(CodeOf([&] { Dataset(s, 3, {1, 2}, {0}, {"W"}, {1.0}); }), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf([&] { Dataset(s, 3, {1, 2, 3}, {3}, {"W"}, {1.0}); }), ErrorCode::kLabel);
  EXPECT_EQ(CodeOf([&] { Dataset(s, 3, {1, 2, 3}, {0}, {"W"}, {-1.0}); }), ErrorCode::kNumeric);
  EXPECT_EQ(CodeOf([&] { Dataset(s, 3, {1, 2, 3}, {0}, {"W"}, {0.0}); }), ErrorCode::kNumeric);
  EXPECT_EQ(CodeOf([&] { Dataset(s, 3, {1, NAN, 3}, {0}, {"W"}, {1.0}); }), ErrorCode::kNumeric);
  EXPECT_EQ(CodeOf([&] { Dataset(s, 3, {1, 2, 3}, {0}, {"W", "B"}, {1.0}); }), ErrorCode::kSize);
  EXPECT_EQ(CodeOf([&] { Dataset(s, 1, {1, 2, 3}, {0}, {"W"}, {1.0}); }), ErrorCode::kLabel);
}

TEST(DatasetTest, DefaultsAndTotals) {
  const Dataset d = Small(6);
  EXPECT_EQ(d.row_id(5), 5u);
  EXPECT_EQ(d.class_names(), (std::vector<std::string>{"0", "1", "2"}));
  EXPECT_EQ(d.TotalWeight(), 9.0);
  EXPECT_EQ(d.ClassWeightTotals(), (std::vector<double>{3.0, 3.0, 3.0}));
  EXPECT_EQ(d.DistinctGroups(), (std::vector<std::string>{"B", "W"}));
}

TEST(ExclusionTest, DropsFlaggedColumnsForEveryRow) {
  const Dataset d = Small(10);
  const Dataset e = ApplyExclusions(d, {FeatureFlag::kJuvenilePrior, FeatureFlag::kSeriousPrior});
  ASSERT_EQ(e.n_features(), 2u);
  EXPECT_EQ(e.schema().feature(0).name, "age");
  EXPECT_EQ(e.schema().feature(1).name, "petty");
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    EXPECT_EQ(e.feature(i, 0), d.feature(i, 0));
    EXPECT_EQ(e.feature(i, 1), d.feature(i, 2));
    EXPECT_EQ(e.label(i), d.label(i));
    EXPECT_EQ(e.group(i), d.group(i));
    EXPECT_EQ(e.weight(i), d.weight(i));
  }
  EXPECT_EQ(ApplyExclusions(d, {}), d);
  EXPECT_EQ(CodeOf([&] {
              ApplyExclusions(d, {FeatureFlag::kBiographical, FeatureFlag::kJuvenilePrior,
                                  FeatureFlag::kDiscretionaryPrior});
            }),
            ErrorCode::kSchema);
}

TEST(SplitTest, EqualDisjointAndDeterministic) {
  for (std::size_t n : {2u, 3u, 10u, 101u}) {
    const Dataset d = Small(n);
    const SplitPair a = SplitEqual(d, 42);
    const SplitPair b = SplitEqual(d, 42);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.train.n_rows(), n / 2);
    EXPECT_EQ(a.test.n_rows(), n - n / 2);
    std::set<std::uint64_t> ids(a.train.row_ids().begin(), a.train.row_ids().end());
    for (std::uint64_t id : a.test.row_ids()) EXPECT_FALSE(ids.count(id));
    ids.insert(a.test.row_ids().begin(), a.test.row_ids().end());
    EXPECT_EQ(ids.size(), n);
    EXPECT_TRUE(std::is_sorted(a.train.row_ids().begin(), a.train.row_ids().end()));
  }
  EXPECT_NE(SplitEqual(Small(50), 1).train, SplitEqual(Small(50), 2).train);
  EXPECT_EQ(CodeOf([] { SplitEqual(Small(1), 0); }), ErrorCode::kSize);
}

TEST(SplitTest, FrequencyOfMembershipIsHalf) {
  const Dataset d = Small(20);
  std::vector<int> in_train(20, 0);
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    const SplitPair split = SplitEqual(d, MixSeed(99, static_cast<std::uint64_t>(s)));
    for (std::uint64_t id : split.train.row_ids()) ++in_train[id];
  }
  // Each row is in train with probability 1/2; 5 sigma is ~0.04 here.
  for (int c : in_train) EXPECT_NEAR(static_cast<double>(c) / trials, 0.5, 0.04);
}

TEST(FilterGroupTest, KeepsOnlyTheGroup) {
  const Dataset d = Small(12);
  const Dataset w = FilterGroup(d, "W");
  EXPECT_EQ(w.n_rows(), 3u);
  for (std::size_t i = 0; i < w.n_rows(); ++i) EXPECT_EQ(w.group(i), "W");
  EXPECT_EQ(CodeOf([&] { FilterGroup(d, "other"); }), ErrorCode::kEmptySelection);
}

TEST(RngTest, UniformIntBoundsAndGeometricMean) {
  Rng rng(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    EXPECT_LT(rng.UniformInt(7), 7u);
    sum += static_cast<double>(rng.Geometric(0.25));
  }
  // mean (1-p)/p = 3, sd ~ 3.5 / sqrt(20000)
  EXPECT_NEAR(sum / 20000, 3.0, 0.15);
  EXPECT_NE(MixSeed(1, 0), MixSeed(1, 1));
  EXPECT_EQ(MixSeed(1, 0), MixSeed(1, 0));
}

TEST(RngTest, EngineMatchesStandardSequence) {
  // The 10000th output of a default-constructed mt19937_64 is fixed by the
  // C++ standard.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.NextU64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

}  // namespace
}  // namespace fairboost
