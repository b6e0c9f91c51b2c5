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
#include <random>

#include <gtest/gtest.h>

#include "fairboost/error.h"
#include "fairboost/gbm.h"
#include "oracles.h"

namespace fairboost {
namespace {

GbmConfig SmallConfig(int rounds = 20) {
  GbmConfig c;
  c.n_rounds = rounds;
  c.max_depth = 3;
  c.subsample = 1.0;
  c.seed = 4;
  return c;
}

// Integer weights replaced by that many unit-weight copies of each row.
Dataset Duplicate(const Dataset& d) {
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::string> g;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (int c = 0; c < static_cast<int>(d.weight(i)); ++c) {
      x.insert(x.end(), d.row(i).begin(), d.row(i).end());
      y.push_back(d.label(i));
      g.push_back(d.group(i));
    }
  }
  return Dataset(d.schema(), d.n_classes(), x, y, g, std::vector<double>(y.size(), 1.0));
}

TEST(SoftmaxTest, MatchesDirectFormulaAndIsShiftStable) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8, 8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s = {u(rng), u(rng), u(rng), u(rng)};
    const auto p = Softmax(s);
    const auto ref = oracle::SoftmaxDirect(s);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_NEAR(p[k], ref[k], 1e-14);
      sum += p[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
  }
  const std::vector<double> huge = {1000.0, 999.0, -1000.0};
  const auto p = Softmax(huge);
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_THROW(Softmax(std::vector<double>{0.0, NAN}), Error);
  EXPECT_EQ(ArgMax(std::vector<double>{0.2, 0.4, 0.4}), 1);
}

TEST(DevianceTest, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3), w(0.1, 5);
  for (int t = 0; t < 200; ++t) {
    const std::vector<double> s = {u(rng), u(rng), u(rng)};
    const int label = static_cast<int>(rng() % 3);
    const double weight = w(rng);
    const GradHess gh = DevianceGradHess(label, Softmax(s), weight);
    const auto fd = oracle::DevianceGradientFd(label, s, weight, 1e-5);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(gh.grad[k], fd[k], 1e-6 * std::max(1.0, std::abs(fd[k])));
      const double fdh = oracle::DevianceHessianDiagFd(label, s, weight, k, 1e-4);
      EXPECT_NEAR(gh.hess[k], fdh, 1e-5 * std::max(1.0, std::abs(fdh)));
    }
    EXPECT_NEAR(Deviance(label, s, weight),
                static_cast<double>(oracle::Deviance(label, {s.begin(), s.end()}, weight)), 1e-12);
  }
}

TEST(GbmConfigTest, Validation) {
  GbmConfig c;
  EXPECT_NO_THROW(c.Validate());
  for (auto mutate : std::vector<void (*)(GbmConfig&)>{
           [](GbmConfig& x) { x.n_rounds = -1; }, [](GbmConfig& x) { x.learning_rate = 0.0; },
           [](GbmConfig& x) { x.max_depth = -1; }, [](GbmConfig& x) { x.subsample = 0.0; },
           [](GbmConfig& x) { x.subsample = 1.5; }, [](GbmConfig& x) { x.n_classes = 1; },
           [](GbmConfig& x) { x.lambda = -1.0; }, [](GbmConfig& x) { x.min_child_weight = -1.0; }}) {
    GbmConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.Validate(), Error);
  }
}

TEST(TrainTest, DeterministicForFixedSeed) {
  std::mt19937_64 rng(5);
  const Dataset d = oracle::RandomDataset(rng, 200, 3, 3, 8, false);
  GbmConfig c = SmallConfig();
  c.subsample = 0.7;
  const BoostModel a = Train(d, c);
  const BoostModel b = Train(d, c);
  EXPECT_EQ(a, b);
  c.seed = 5;
  EXPECT_NE(Train(d, c), a);
}

TEST(TrainTest, MonotoneDevianceWithoutSubsampling) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    const Dataset d = oracle::RandomDataset(rng, 150, 3, 3, 6, true);
    TrainingLog log;
    Train(d, SmallConfig(40), &log);
    ASSERT_EQ(log.deviance.size(), 41u);
    for (std::size_t r = 1; r < log.deviance.size(); ++r) {
      EXPECT_LE(log.deviance[r], log.deviance[r - 1] * (1.0 + 1e-12)) << "round " << r;
    }
  }
}

TEST(TrainTest, IntegerWeightsEqualDuplication) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Dataset d = oracle::RandomDataset(rng, 40, 2, 3, 5, true);
    const BoostModel a = Train(d, SmallConfig(10));
    const BoostModel b = Train(Duplicate(d), SmallConfig(10));
    ASSERT_EQ(a.rounds.size(), b.rounds.size());
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a.base_scores[k], b.base_scores[k], 1e-12);
    for (std::size_t r = 0; r < a.rounds.size(); ++r) {
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& na = a.rounds[r][k].nodes();
        const auto& nb = b.rounds[r][k].nodes();
        ASSERT_EQ(na.size(), nb.size()) << "round " << r << " class " << k;
        for (std::size_t i = 0; i < na.size(); ++i) {
          EXPECT_EQ(na[i].feature, nb[i].feature);
          EXPECT_EQ(na[i].threshold, nb[i].threshold);
          EXPECT_NEAR(na[i].value, nb[i].value, 1e-9);
        }
      }
    }
  }
}

TEST(TrainTest, InvariantToGlobalWeightScale) {
  std::mt19937_64 rng(8);
  const Dataset d = oracle::RandomDataset(rng, 60, 2, 3, 5, true);
  std::vector<double> w(d.weights().begin(), d.weights().end());
  for (double& v : w) v *= 0.25;
  EXPECT_EQ(Train(d, SmallConfig(5)).rounds, Train(d.WithWeights(w), SmallConfig(5)).rounds);
}

TEST(TrainTest, GroupTagNeverReachesPredictions) {
  std::mt19937_64 rng(9);
  const Dataset d = oracle::RandomDataset(rng, 120, 3, 3, 6, false);
  std::vector<std::string> flipped = d.groups();
  for (auto& g : flipped) g = g == "A" ? "B" : "A";
  const Dataset e(d.schema(), 3, {d.features().begin(), d.features().end()}, {d.labels().begin(), d.labels().end()},
                  flipped, {d.weights().begin(), d.weights().end()});
  const BoostModel m = Train(d, SmallConfig());
  EXPECT_EQ(m, Train(e, SmallConfig()));
  EXPECT_EQ(m.PredictProbaAll(d), m.PredictProbaAll(e));
}

TEST(TrainTest, ZeroRoundsPredictsTrainingPriors) {
  const Schema s({{"x"}});
  const Dataset d(s, 3, {0, 1, 2, 3, 4}, {1, 1, 1, 0, 2}, {"A", "A", "A", "A", "A"}, {1, 1, 1, 1, 1});
  GbmConfig c = SmallConfig(0);
  const BoostModel m = Train(d, c);
  EXPECT_TRUE(m.rounds.empty());
  const auto p = m.PredictProba(std::vector<double>{10.0});
  EXPECT_NEAR(p[0], 0.2, 1e-15);
  EXPECT_NEAR(p[1], 0.6, 1e-15);
  EXPECT_EQ(m.PredictClasses(d), (std::vector<int>{1, 1, 1, 1, 1}));
}

TEST(TrainTest, Errors) {
  const Schema s({{"x"}});
  const Dataset missing_class(s, 3, {0, 1}, {0, 1}, {"A", "A"}, {1, 1});
  EXPECT_THROW(
      {
        try {
          Train(missing_class, SmallConfig());
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kDegenerateClass);
          throw;
        }
      },
      Error);
  GbmConfig two = SmallConfig();
  two.n_classes = 2;
  EXPECT_THROW(Train(missing_class, two), Error);

  const Dataset ok(s, 3, {0, 1, 2}, {0, 1, 2}, {"A", "A", "A"}, {1, 1, 1});
  const BoostModel m = Train(ok, SmallConfig(2));
  EXPECT_THROW(m.PredictScores(std::vector<double>{1.0, 2.0}), Error);
  const Dataset other(Schema({{"y"}}), 3, {0}, {0}, {"A"}, {1});
  EXPECT_THROW(m.PredictClasses(other), Error);
}

TEST(TrainTest, LearnsAnObviousRule) {
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    x.push_back(i % 30);
    y.push_back(i % 30 < 10 ? 0 : (i % 30 < 20 ? 1 : 2));
  }
  const Dataset d(Schema({{"x"}}), 3, x, y, std::vector<std::string>(300, "A"), std::vector<double>(300, 1.0));
  const BoostModel m = Train(d, SmallConfig(30));
  EXPECT_EQ(m.PredictClasses(d), y);
}

}  // namespace
}  // namespace fairboost
