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

#include <filesystem>

#include <gtest/gtest.h>

#include "fairboost/csv.h"
#include "fairboost/pipeline.h"

namespace fairboost {
namespace {

namespace fs = std::filesystem;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("fairboost_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path root_;
};

Json FullConfig() {
  return Json::parse(R"({
    "data": {"generator": {"preset": "default", "n": 3000, "seed": 17}},
    "exclude_flags": ["juvenile_prior", "discretionary_prior"],
    "seeds": {"split": 5, "train": 6, "audit": 7},
    "gbm": {"n_rounds": 15, "max_depth": 3},
    "training_group": "W",
    "weights": {"mode": "calibrate", "target": "uniform", "max_iter": 3, "tolerance": 0.15},
    "downweight": {"class": 2, "match_group": "W"},
    "transform": {"steps": [{"features": {"names": [], "flags": ["serious_prior"]}, "group": "B",
                             "op": {"kind": "sqrt"}}]},
    "audit": {"baselines": ["majority_class", "coin_flip"],
              "bootstrap": {"statistics": ["predicted_share:2@B", "col_error:2@W"], "replicates": 200,
                            "level": 0.9},
              "robustness": {"split_seeds": [1, 2], "threshold": 0.05}},
    "interpret": {"importance": true,
                  "pdp": [{"feature": "age", "class": 2, "bins": {"kind": "spacing", "step": 5, "origin": 16}}]}
  })");
}

ErrorCode StageCode(const PipelineConfig& c, const fs::path& out, std::string* stage) {
  try {
    RunPipeline(c, out);
  } catch (const StageError& e) {
    *stage = e.stage();
    return e.code();
  }
  ADD_FAILURE() << "expected a StageError";
  return ErrorCode::kIo;
}

TEST(PipelineConfigTest, CanonicalFormIsAFixedPoint) {
  const PipelineConfig c = PipelineConfigFromJson(FullConfig());
  const Json canon = ToJson(c);
  EXPECT_EQ(ToJson(PipelineConfigFromJson(canon)), canon);
  EXPECT_EQ(RunId(c), RunId(PipelineConfigFromJson(canon)));
  EXPECT_EQ(c.training_group, "W");
  ASSERT_TRUE(c.downweight.has_value());
  EXPECT_EQ(c.downweight->match_group, "W");
  EXPECT_EQ(c.bootstrap->statistics.size(), 2u);
}

TEST(PipelineConfigTest, Rejections) {
  auto code = [](const Json& j) {
    try {
      PipelineConfigFromJson(j);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  Json j = FullConfig();
  j["unexpected"] = 1;
  EXPECT_EQ(code(j), ErrorCode::kConfig);
  j = FullConfig();
  j["data"]["csv"] = Json{{"path", "x.csv"}};
  EXPECT_EQ(code(j), ErrorCode::kConfig);
  j = FullConfig();
  j["downweight"]["factor"] = 0.5;
  EXPECT_EQ(code(j), ErrorCode::kConfig);
  j = FullConfig();
  j["weights"]["mode"] = "magic";
  EXPECT_EQ(code(j), ErrorCode::kConfig);
  j = FullConfig();
  j["gbm"]["depth"] = 3;
  EXPECT_EQ(code(j), ErrorCode::kConfig);
}

TEST(PipelineConfigTest, SeedOverrideDerivesEverySeed) {
  PipelineConfig c = PipelineConfigFromJson(FullConfig());
  const std::string before = RunId(c);
  OverrideSeeds(c, 42);
  EXPECT_EQ(c.data.generator->seed, 42u);
  EXPECT_NE(c.seeds.split, c.seeds.train);
  EXPECT_NE(RunId(c), before);
}

TEST_F(PipelineTest, FullRunWritesArtifactsAndReplaysByteForByte) {
  const PipelineConfig c = PipelineConfigFromJson(FullConfig());
  const RunResult a = RunPipeline(c, root_ / "a");
  for (const char* name : {"manifest.json", "model.json", "weight_plan.json", "audit.json", "W-confusion.md",
                           "B-confusion.csv", "all-confusion.json", "disparities.md", "baselines.json",
                           "bootstrap.json", "robustness.json", "importance.json", "importance.csv",
                           "pdp-age-2.json", "pdp-age-2.csv"}) {
    EXPECT_TRUE(fs::exists(a.dir / name)) << name;
  }
  EXPECT_EQ(a.model.training_group, "W");
  EXPECT_NE(a.manifest["train_rows_fingerprint"], a.manifest["test_rows_fingerprint"]);

  // Replaying the manifest in a fresh directory reproduces every file.
  const Json manifest = ReadJsonFile(a.dir / "manifest.json");
  const RunResult b = RunPipeline(PipelineConfigFromJson(manifest), root_ / "b");
  EXPECT_EQ(b.run_id, a.run_id);
  EXPECT_TRUE(VerifyArtifacts(manifest, b.dir).empty());
  EXPECT_EQ(ReadTextFile(b.dir / "manifest.json"), ReadTextFile(a.dir / "manifest.json"));

  WriteTextFile(b.dir / "audit.json", "{}\n");
  EXPECT_EQ(VerifyArtifacts(manifest, b.dir), std::vector<std::string>{"audit.json"});
}

TEST_F(PipelineTest, DownweightMatchesTargetShare) {
  Json j = FullConfig();
  j["audit"] = Json::object();
  j["interpret"] = Json{{"importance", false}};
  j["downweight"] = Json{{"class", 2}, {"target_share", 0.05}};
  const RunResult r = RunPipeline(PipelineConfigFromJson(j), root_);
  const Json plan = ReadJsonFile(r.dir / "weight_plan.json");
  const auto eff = plan["effective_class_weights"].get<std::vector<double>>();
  // Recompute the weighted class shares of the training rows.
  const PipelineConfig c = PipelineConfigFromJson(j);
  const Dataset data = ApplyExclusions(Generate(*c.data.generator), c.exclude);
  const Dataset train = FilterGroup(SplitEqual(data, c.seeds.split).train, "W");
  std::vector<double> totals = train.ClassWeightTotals();
  double all = 0.0;
  for (std::size_t k = 0; k < 3; ++k) all += totals[k] * eff[k];
  EXPECT_NEAR(totals[2] * eff[2] / all, 0.05, 1e-12);
  EXPECT_LT(plan["downweight"]["factor"].get<double>(), 1.0);
}

TEST_F(PipelineTest, ZeroRoundsSkipsImportanceAndPredictsThePrior) {
  Json j = FullConfig();
  j["gbm"]["n_rounds"] = 0;
  j["weights"] = Json{{"mode", "none"}};
  j.erase("downweight");
  j.erase("transform");
  j["audit"] = Json::object();
  j["interpret"]["pdp"] = Json::array();
  const RunResult r = RunPipeline(PipelineConfigFromJson(j), root_);
  EXPECT_FALSE(fs::exists(r.dir / "importance.json"));
  ASSERT_EQ(r.manifest["notes"].size(), 1u);
  const auto& all = r.audit.reports.at("all");
  // Every prediction is the training-prior mode, class 0.
  EXPECT_EQ(all.predicted_shares[0], 1.0);
}

TEST_F(PipelineTest, UndefinedBootstrapStatisticIsSkippedWithANote) {
  Json j = FullConfig();
  j["gbm"]["n_rounds"] = 0;
  j["weights"] = Json{{"mode", "none"}};
  j.erase("downweight");
  j["audit"] = Json{{"bootstrap", {{"statistics", {"col_error:2@all", "predicted_share:0@B"}}, {"replicates", 100}}}};
  j["interpret"] = Json{{"importance", false}, {"pdp", Json::array()}};
  const RunResult r = RunPipeline(PipelineConfigFromJson(j), root_);
  // Nothing is predicted violent, so that column error has no mass.
  ASSERT_EQ(r.manifest["notes"].size(), 1u);
  EXPECT_NE(r.manifest["notes"][0].get<std::string>().find("col_error:2@all"), std::string::npos);
  const Json boot = ReadJsonFile(r.dir / "bootstrap.json");
  ASSERT_EQ(boot["results"].size(), 1u);
}

TEST_F(PipelineTest, StageErrorsNameTheStage) {
  std::string stage;
  Json j = FullConfig();
  j["training_group"] = "nobody";
  EXPECT_EQ(StageCode(PipelineConfigFromJson(j), root_, &stage), ErrorCode::kEmptySelection);
  EXPECT_EQ(stage, "select");

  j = FullConfig();
  j["interpret"]["pdp"][0]["feature"] = "Jviolent";  // excluded predictor
  j["audit"] = Json::object();
  EXPECT_EQ(StageCode(PipelineConfigFromJson(j), root_, &stage), ErrorCode::kSchema);
  EXPECT_EQ(stage, "interpret");

  j = FullConfig();
  j["gbm"]["n_classes"] = 2;
  EXPECT_EQ(StageCode(PipelineConfigFromJson(j), root_, &stage), ErrorCode::kConfig);
  EXPECT_EQ(stage, "train");
}

TEST_F(PipelineTest, CsvSourceMatchesGeneratorSource) {
  Json gen = FullConfig();
  gen["audit"] = Json::object();
  gen["interpret"] = Json{{"importance", true}};
  gen["weights"] = Json{{"mode", "manual"}, {"class_weights", {1.0, 2.0, 4.0}}};
  gen.erase("downweight");
  const PipelineConfig gc = PipelineConfigFromJson(gen);
  const Dataset d = Generate(*gc.data.generator);
  SaveCsv(root_ / "data.csv", d);

  Json csv = gen;
  csv["data"] = Json{{"csv",
                      {{"path", (root_ / "data.csv").string()},
                       {"schema", ToJson(d.schema())},
                       {"class_names", d.class_names()}}}};
  const RunResult a = RunPipeline(gc, root_ / "gen");
  const RunResult b = RunPipeline(PipelineConfigFromJson(csv), root_ / "csv");
  EXPECT_EQ(a.model.rounds, b.model.rounds);
  EXPECT_EQ(ReadTextFile(a.dir / "audit.json"), ReadTextFile(b.dir / "audit.json"));
}

TEST_F(PipelineTest, CompareReports) {
  Json j = FullConfig();
  j["audit"] = Json::object();
  j["interpret"] = Json{{"importance", false}};
  const RunResult r = RunPipeline(PipelineConfigFromJson(j), root_);
  const Json audit = ReadJsonFile(r.dir / "audit.json");
  const Comparison self = CompareReports(audit, audit);
  ASSERT_FALSE(self.rows.empty());
  for (const auto& row : self.rows) {
    EXPECT_EQ(row.share_diff, 0.0);
    if (row.col_error_diff) {
      EXPECT_EQ(*row.col_error_diff, 0.0);
    }
  }
  const Comparison wb = CompareReports(ReadJsonFile(r.dir / "W-confusion.json"), ReadJsonFile(r.dir / "B-confusion.json"));
  EXPECT_EQ(wb.rows.size(), 3u);
  EXPECT_EQ(wb.class_names[2], "violent_arrest");
  EXPECT_NE(ComparisonMarkdown(wb).find("violent_arrest"), std::string::npos);
  try {
    CompareReports(audit, ReadJsonFile(r.dir / "W-confusion.json"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatible);
  }
}

TEST(ProjectToSchemaTest, ReordersByName) {
  const Dataset d(Schema({{"a"}, {"b"}}), 2, {1, 2, 3, 4}, {0, 1}, {"W", "B"}, {1, 1});
  const Dataset p = ProjectToSchema(d, Schema({{"b"}}));
  EXPECT_EQ(p.feature(1, 0), 4.0);
  EXPECT_THROW(ProjectToSchema(d, Schema({{"c"}})), Error);
}

}  // namespace
}  // namespace fairboost
