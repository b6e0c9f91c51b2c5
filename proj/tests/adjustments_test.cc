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

#include <bit>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairboost/adjustments.h"
#include "fairboost/audit.h"
#include "fairboost/error.h"
#include "oracles.h"

namespace fairboost {
namespace {

Dataset PriorsData() {
  const Schema s({{"age", FeatureKind::kYears, {FeatureFlag::kBiographical}},
                  {"adult", FeatureKind::kCount, {FeatureFlag::kSeriousPrior}},
                  {"juv", FeatureKind::kCount, {FeatureFlag::kJuvenilePrior}}});
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::string> g;
  for (int i = 0; i < 40; ++i) {
    x.insert(x.end(), {18.0 + i, static_cast<double>(i % 7), static_cast<double>(i % 5)});
    y.push_back(i % 3);
    g.push_back(i % 2 ? "B" : "W");
  }
  return Dataset(s, 3, x, y, g, std::vector<double>(40, 1.0));
}

TEST(WeightPlanTest, MultipliesByClass) {
  const Dataset d = PriorsData();
  const Dataset w = ApplyWeightPlan(d, WeightPlan::Manual({1.0, 2.0, 0.5}));
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    EXPECT_EQ(w.weight(i), std::vector<double>({1.0, 2.0, 0.5})[static_cast<std::size_t>(d.label(i))]);
  }
  EXPECT_THROW(ApplyWeightPlan(d, WeightPlan::Manual({1.0, 2.0})), Error);
  EXPECT_THROW(ApplyWeightPlan(d, WeightPlan::Manual({1.0, 0.0, 1.0})), Error);
  EXPECT_THROW(DownweightClass(d, 2, 0.0), Error);
  EXPECT_THROW(DownweightClass(d, 2, 1.5), Error);
  EXPECT_THROW(DownweightClass(d, 3, 0.5), Error);
  const Dataset dw = DownweightClass(d, 2, 0.25);
  EXPECT_NEAR(dw.ClassWeightTotals()[2], 0.25 * d.ClassWeightTotals()[2], 1e-12);
  EXPECT_EQ(dw.ClassWeightTotals()[0], d.ClassWeightTotals()[0]);
}

TEST(CostRatioTest, EmpiricalRatiosAndTolerance) {
  const auto r = EmpiricalCostRatios({{5, 4, 0}, {2, 5, 3}, {0, 6, 5}});
  EXPECT_EQ(r[0][1], 2.0);
  EXPECT_EQ(r[1][0], 0.5);
  EXPECT_TRUE(std::isnan(r[0][2]));
  EXPECT_EQ(r[1][2], 0.5);
  const auto t = UniformCostTarget(3);
  EXPECT_FALSE(CostRatiosWithin(r, t, 0.15));
  EXPECT_TRUE(CostRatiosWithin({{1, 1.17, 1}, {0.86, 1, 0.9}, {1, 1.1, 1}}, t, 0.15));
  EXPECT_FALSE(CostRatiosWithin({{1, 0.84, 1}, {1.2, 1, 1}, {1, 1, 1}}, t, 0.15));
  EXPECT_TRUE(std::isinf(EmpiricalCostRatios({{1, 3}, {0, 1}})[0][1]));
}

TEST(CalibrationTest, ReachesUniformTargetOnImbalancedData) {
  // Class 2 is rare and weakly predictable; unweighted training rarely
  // predicts it.
  std::mt19937_64 rng(3);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 3000; ++i) {
    const double a = static_cast<double>(rng() % 10), b = static_cast<double>(rng() % 10);
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    const double p2 = 0.03 + 0.015 * a, p1 = 0.2 + 0.04 * b;
    y.push_back(u < p2 ? 2 : (u < p2 + p1 ? 1 : 0));
    x.insert(x.end(), {a, b});
  }
  const Dataset d(Schema({{"a"}, {"b"}}), 3, x, y, std::vector<std::string>(y.size(), "W"),
                  std::vector<double>(y.size(), 1.0));
  GbmConfig c;
  c.n_rounds = 40;
  c.max_depth = 3;
  const WeightPlan plan = CalibrateCostRatios(d, c, UniformCostTarget(3), 20, 0.15);
  ASSERT_TRUE(plan.calibration.has_value());
  EXPECT_EQ(plan.provenance, WeightPlan::Provenance::kCalibrated);
  EXPECT_TRUE(plan.calibration->converged);
  EXPECT_LE(plan.calibration->iterations, 20);
  // Independent re-check of the reported ratios.
  const Dataset w = ApplyWeightPlan(d, plan);
  const BoostModel m = Train(w, c);
  // Ratios are taken over case counts, not over the plan weights.
  const ConfusionReport r = Confusion(d.labels(), m.PredictClasses(w), d.weights(), 3);
  EXPECT_TRUE(CostRatiosWithin(EmpiricalCostRatios(r.counts), UniformCostTarget(3), 0.15));
  EXPECT_GT(plan.class_weights[2], plan.class_weights[0]);
}

TEST(TransformTest, SqrtTouchesOnlyTargetedCells) {
  const Dataset d = PriorsData();
  TransformSpec spec;
  spec.steps.push_back({{{}, FlagSet{FeatureFlag::kSeriousPrior, FeatureFlag::kJuvenilePrior}}, "B", TransformOp::Sqrt()});
  const Dataset t = ApplyTransform(d, spec);
  EXPECT_EQ(t.labels().size(), d.labels().size());
  EXPECT_TRUE(std::equal(t.labels().begin(), t.labels().end(), d.labels().begin()));
  EXPECT_TRUE(std::equal(t.weights().begin(), t.weights().end(), d.weights().begin()));
  EXPECT_EQ(t.groups(), d.groups());
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (std::size_t f = 0; f < 3; ++f) {
      const auto before = std::bit_cast<std::uint64_t>(d.feature(i, f));
      const auto after = std::bit_cast<std::uint64_t>(t.feature(i, f));
      if (d.group(i) == "B" && f > 0) {
        EXPECT_EQ(t.feature(i, f), std::sqrt(d.feature(i, f)));
      } else {
        EXPECT_EQ(before, after) << "row " << i << " feature " << f;
      }
    }
  }
}

TEST(TransformTest, ScaleThenRecode) {
  const Schema s({{"x"}});
  const Dataset d(s, 2, {0, 1, 2, 3, 4}, {0, 1, 0, 1, 0}, {"W", "W", "W", "W", "W"}, {1, 1, 1, 1, 1});
  TransformSpec spec;
  spec.steps.push_back({{{"x"}, {}}, std::nullopt, TransformOp::Scale(0.5)});
  spec.steps.push_back({{{"x"}, {}}, std::nullopt, TransformOp::Recode(1.0, 0.0)});
  const Dataset t = ApplyTransform(d, spec);
  EXPECT_EQ(t.feature(2, 0), 0.0);
  EXPECT_EQ(t.feature(4, 0), 2.0);
  EXPECT_EQ(t.feature(3, 0), 1.5);
  EXPECT_EQ(t.feature(1, 0), 0.5);
}

TEST(TransformTest, Errors) {
  const Dataset d(Schema({{"x"}}), 2, {-1, 1}, {0, 1}, {"W", "B"}, {1, 1});
  TransformSpec sqrt_all;
  sqrt_all.steps.push_back({{{"x"}, {}}, std::nullopt, TransformOp::Sqrt()});
  try {
    ApplyTransform(d, sqrt_all);
    ADD_FAILURE() << "expected kDomain";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
    EXPECT_NE(std::string(e.what()).find("row 0"), std::string::npos);
  }
  TransformSpec sqrt_b = sqrt_all;
  sqrt_b.steps[0].group = "B";
  EXPECT_EQ(ApplyTransform(d, sqrt_b).feature(1, 0), 1.0);
  TransformSpec bad_scale;
  bad_scale.steps.push_back({{{"x"}, {}}, std::nullopt, TransformOp::Scale(0.0)});
  EXPECT_THROW(ApplyTransform(d, bad_scale), Error);
  TransformSpec unknown;
  unknown.steps.push_back({{{"y"}, {}}, std::nullopt, TransformOp::Sqrt()});
  EXPECT_THROW(ApplyTransform(d, unknown), Error);
  EXPECT_THROW(ResolveFeatures(d.schema(), {{}, FlagSet{FeatureFlag::kInstantCharge}}), Error);
}

}  // namespace
}  // namespace fairboost
