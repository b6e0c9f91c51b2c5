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

// Config-driven experiment runs. Stages execute in a fixed order:
//
//   load, exclude, split, select (training group), weights, downweight,
//   train, transform (test rows only), audit, baselines, bootstrap,
//   robustness, interpret
//
// Every artifact lands in <out>/<run id>/ under a stable name, and the run
// manifest records the fully resolved config, so running the manifest again
// reproduces every report byte for byte.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairboost/adjustments.h"
#include "fairboost/audit.h"
#include "fairboost/csv.h"
#include "fairboost/error.h"
#include "fairboost/gbm.h"
#include "fairboost/interpret.h"
#include "fairboost/json_io.h"
#include "fairboost/synthgen.h"

namespace fairboost {

struct CsvSource {
  std::filesystem::path path;
  Schema schema;
  CsvOptions options;
};

struct DataSource {
  std::optional<GeneratorSpec> generator;
  std::optional<CsvSource> csv;
};

struct WeightSource {
  enum class Mode { kNone, kManual, kCalibrate };
  Mode mode = Mode::kNone;
  std::vector<double> class_weights;            // kManual
  std::vector<std::vector<double>> target;      // kCalibrate; empty means 1:1
  int max_iter = 20;
  double tolerance = 0.15;
};

// Exactly one of factor, target_share and match_group is set. target_share
// picks the factor that makes the class's weighted share of the training
// rows equal the target (capped at 1); match_group uses that group's
// observed share of the class in the loaded data as the target.
struct DownweightSpec {
  int cls = 0;
  std::optional<double> factor;
  std::optional<double> target_share;
  std::optional<std::string> match_group;
};

struct BootstrapOptions {
  std::vector<MetricSelector> statistics;
  int replicates = 1000;
  double level = 0.95;
};

struct RobustnessConfig {
  std::vector<GbmConfig> grid;  // empty: the run's own gbm config
  std::vector<std::uint64_t> split_seeds;
  double threshold = 0.05;
};

struct PdpRequest {
  std::string feature;
  int cls = 0;
  BinningRule bins;
};

struct PipelineSeeds {
  std::uint64_t split = 1;
  std::uint64_t train = 2;
  std::uint64_t audit = 3;
};

struct PipelineConfig {
  DataSource data;
  FlagSet exclude;
  PipelineSeeds seeds;
  GbmConfig gbm;
  std::optional<std::string> training_group;
  WeightSource weights;
  std::optional<DownweightSpec> downweight;
  std::optional<TransformSpec> transform;
  std::vector<BaselineKind> baselines;
  std::optional<BootstrapOptions> bootstrap;
  std::optional<RobustnessConfig> robustness;
  bool importance = true;
  std::vector<PdpRequest> pdp;
};

// Accepts a config document or a run manifest (whose "config" is used).
PipelineConfig PipelineConfigFromJson(const Json& j);
// Canonical form with every default spelled out.
Json ToJson(const PipelineConfig& config);

// Sets the generator seed (when generating) and derives the split, train and
// audit seeds from `seed`.
void OverrideSeeds(PipelineConfig& config, std::uint64_t seed);

// "run-" followed by the hex digest of the canonical config.
std::string RunId(const PipelineConfig& config);

// A library error tagged with the stage it aborted.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, ErrorCode code, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)), code_(code) {}

  const std::string& stage() const { return stage_; }
  ErrorCode code() const { return code_; }

 private:
  std::string stage_;
  ErrorCode code_;
};

struct RunResult {
  std::string run_id;
  std::filesystem::path dir;
  Json manifest;
  BoostModel model;
  WeightPlan weight_plan;
  AuditBundle audit;
  std::vector<std::string> artifacts;  // file names inside dir, sorted
};

// Runs every configured stage and writes artifacts to out_root/<run id>/.
// Throws StageError.
RunResult RunPipeline(const PipelineConfig& config, const std::filesystem::path& out_root);

// Files named in a manifest whose current digest differs from the recorded
// one (empty when the run directory matches the manifest).
std::vector<std::string> VerifyArtifacts(const Json& manifest, const std::filesystem::path& dir);

// Hex FNV-1a digest of a file's bytes.
std::string FileDigest(const std::filesystem::path& path);

// Projects data onto `schema` by feature name. Throws kSchema naming a
// feature the data lacks.
Dataset ProjectToSchema(const Dataset& data, const Schema& schema);

// A .json dataset container, or CSV read against `schema`.
Dataset LoadDatasetFile(const std::filesystem::path& path, const Schema& schema,
                        const CsvOptions& options = {});

// Writes <stem>.json/.md/.csv for one confusion report into dir and returns
// the file names.
std::vector<std::string> WriteConfusionFiles(const std::filesystem::path& dir, const std::string& stem,
                                             const ConfusionReport& report,
                                             const std::vector<std::string>& class_names,
                                             const std::optional<std::string>& training_group);

struct ComparisonRow {
  std::string group_a;
  std::string group_b;
  int cls = 0;
  double share_a = 0.0;
  double share_b = 0.0;
  double share_diff = 0.0;  // a - b
  std::optional<double> col_error_a;
  std::optional<double> col_error_b;
  std::optional<double> col_error_diff;
};

struct Comparison {
  std::vector<std::string> class_names;
  std::vector<ComparisonRow> rows;
};

// Two audit bundles with the same groups (compared group by group), or two
// single confusion reports. Throws kIncompatible otherwise.
Comparison CompareReports(const Json& a, const Json& b);
Json ToJson(const Comparison& comparison);
std::string ComparisonMarkdown(const Comparison& comparison);

}  // namespace fairboost
