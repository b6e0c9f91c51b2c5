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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fairboost/error.h"
#include "fairboost/interpret.h"
#include "oracles.h"

namespace fairboost {
namespace {

Schema ThreeCounts() {
  return Schema({{"a", FeatureKind::kCount, {}}, {"b", FeatureKind::kCount, {}}, {"c", FeatureKind::kBinary, {}}});
}

// One round; class 0 tree splits feature 0 at `threshold`, others are stumps.
BoostModel SingleSplitModel(double threshold) {
  BoostModel m;
  m.config.n_rounds = 1;
  m.config.learning_rate = 0.5;
  m.base_scores = {0.0, 0.0, 0.0};
  m.schema = ThreeCounts();
  m.class_names = {"0", "1", "2"};
  TreeNode root;
  root.feature = 0;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.gain = 3.0;
  TreeNode l, r;
  l.value = -1.0;
  r.value = 2.0;
  m.rounds.push_back({Tree({root, l, r}), Tree({TreeNode{}}), Tree({TreeNode{}})});
  return m;
}

Dataset Reference(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(static_cast<double>(rng() % 8));
    x.push_back(static_cast<double>(rng() % 5));
    x.push_back(static_cast<double>(rng() % 2));
  }
  std::vector<int> y(n, 0);
  for (std::size_t i = 0; i < 3 && i < n; ++i) y[i] = static_cast<int>(i);
  return Dataset(ThreeCounts(), 3, x, y, std::vector<std::string>(n, "W"), std::vector<double>(n, 1.0));
}

TEST(ImportanceTest, SharesSumToHundredAndFindPlantedSignal) {
  std::mt19937_64 rng(4);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 1500; ++i) {
    const double signal = static_cast<double>(rng() % 10), noise = static_cast<double>(rng() % 10);
    const double weak = static_cast<double>(rng() % 2);
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    y.push_back(u < 0.05 + 0.09 * signal ? 2 : (u < 0.5 + 0.05 * weak ? 1 : 0));
    x.insert(x.end(), {signal, noise, weak});
  }
  const Dataset d(Schema({{"signal"}, {"noise"}, {"weak", FeatureKind::kBinary, {}}}), 3, x, y,
                  std::vector<std::string>(y.size(), "W"), std::vector<double>(y.size(), 1.0));
  GbmConfig c;
  c.n_rounds = 30;
  c.max_depth = 2;
  c.seed = 1;
  const ImportanceReport r = Importance(Train(d, c));
  double total = 0.0;
  for (const auto& f : r.features) {
    EXPECT_GE(f.share, 0.0);
    total += f.share;
  }
  EXPECT_NEAR(total, 100.0, 1e-9);
  EXPECT_EQ(r.features[0].name, "signal");
  EXPECT_GT(r.features[0].share, 60.0);
}

TEST(ImportanceTest, HandBuiltModel) {
  const ImportanceReport r = Importance(SingleSplitModel(2.5));
  EXPECT_EQ(r.features[0].share, 100.0);
  EXPECT_EQ(r.features[1].share, 0.0);
  BoostModel none = SingleSplitModel(2.5);
  none.rounds[0][0] = Tree({TreeNode{}});
  try {
    Importance(none);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateImportance);
  }
  none.rounds.clear();
  EXPECT_THROW(Importance(none), Error);
}

TEST(PdpTest, SingleSplitStepsAtThreshold) {
  const BoostModel m = SingleSplitModel(2.5);
  const Dataset ref = Reference(200, 1);
  const PdpCurve c = PartialDependence(m, ref, "a", BinningRule::Explicit({0, 1, 2, 2.4999, 2.5, 3, 7}), 0);
  ASSERT_EQ(c.points.size(), 7u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(c.points[i].logit, c.points[0].logit);
  for (std::size_t i = 5; i < 7; ++i) EXPECT_EQ(c.points[i].logit, c.points[4].logit);
  EXPECT_GT(c.points[4].logit, c.points[3].logit);
  // Scores (0.5*v, 0, 0): mean probability is the softmax directly since
  // every row gets the same value.
  const auto left = oracle::SoftmaxDirect({-0.5, 0.0, 0.0});
  EXPECT_NEAR(c.points[0].mean_probability, left[0], 1e-15);
  EXPECT_NEAR(c.points[0].logit, std::log(left[0] / (1 - left[0])), 1e-14);
  EXPECT_EQ(c.logit_convention, std::string(kLogitConvention));
}

TEST(PdpTest, UnusedFeatureIsFlat) {
  const BoostModel m = SingleSplitModel(3.5);
  const Dataset ref = Reference(300, 2);
  for (const std::string f : {"b", "c"}) {
    const PdpCurve c = PartialDependence(m, ref, f, BinningRule{}, 2);
    ASSERT_GE(c.points.size(), 2u);
    for (const auto& p : c.points) EXPECT_NEAR(p.logit, c.points[0].logit, 1e-12);
  }
}

TEST(PdpTest, AveragesProbabilitiesOverRowsUnweighted) {
  std::mt19937_64 rng(3);
  const Dataset d = oracle::RandomDataset(rng, 80, 2, 3, 6, true);
  GbmConfig c;
  c.n_rounds = 8;
  c.max_depth = 2;
  const BoostModel m = Train(d, c);
  const PdpCurve curve = PartialDependence(m, d, "f1", BinningRule::Spacing(2.0, 1.0), 1);
  for (const auto& p : curve.points) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      std::vector<double> x(d.row(i).begin(), d.row(i).end());
      x[1] = p.value;
      sum += oracle::SoftmaxDirect(m.PredictScores(x))[1];
    }
    const double mean = static_cast<double>(sum / d.n_rows());
    EXPECT_NEAR(p.mean_probability, mean, 1e-13);
    EXPECT_NEAR(p.logit, std::log(mean / (1 - mean)), 1e-11);
  }
}

TEST(PdpTest, Errors) {
  BoostModel m = SingleSplitModel(2.5);
  const Dataset ref = Reference(20, 3);
  EXPECT_THROW(PartialDependence(m, ref, "zzz", {}, 0), Error);
  EXPECT_THROW(PartialDependence(m, ref, "a", {}, 3), Error);
  m.base_scores = {0.0, -2000.0, -2000.0};
  try {
    PartialDependence(m, ref, "a", {}, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLogitOverflow);
  }
}

TEST(BinningTest, Rules) {
  const Dataset ref = Reference(500, 4);  // a in 0..7, b in 0..4, c binary
  EXPECT_EQ(BinValues(ref, 0, {}), (std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7}));
  BinningRule capped;
  capped.bins = 4;
  EXPECT_EQ(BinValues(ref, 0, capped), (std::vector<double>{0, 3, 6}));
  EXPECT_EQ(BinValues(ref, 2, {}), (std::vector<double>{0, 1}));
  EXPECT_EQ(BinValues(ref, 1, BinningRule::Spacing(1.5, 0.5)), (std::vector<double>{0.5, 2.0, 3.5}));
  EXPECT_EQ(BinValues(ref, 0, BinningRule::EqualWidth(3)), (std::vector<double>{0, 3.5, 7}));
  EXPECT_THROW(BinValues(ref, 0, BinningRule::Explicit({1, 1})), Error);
  EXPECT_THROW(BinValues(ref, 0, BinningRule::Spacing(0.0)), Error);
}

TEST(CsvOutputTest, Headers) {
  EXPECT_EQ(ImportanceCsv(Importance(SingleSplitModel(1.5))).substr(0, 22), "feature,share_percent\n");
  const PdpCurve c = PartialDependence(SingleSplitModel(1.5), Reference(10, 5), "a", BinningRule::Explicit({1}), 0);
  EXPECT_EQ(PdpCsv(c).substr(0, 43), "feature,class,value,mean_probability,logit\n");
}

}  // namespace
}  // namespace fairboost
