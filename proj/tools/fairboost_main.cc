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

// fairboost command-line tool: gen, run, compare, audit, pdp, importance.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fairboost/audit.h"
#include "fairboost/csv.h"
#include "fairboost/interpret.h"
#include "fairboost/json_io.h"
#include "fairboost/pipeline.h"
#include "fairboost/rng.h"
#include "fairboost/synthgen.h"

namespace fs = std::filesystem;
using namespace fairboost;

namespace {

struct DataOptions {
  std::string label_column = "label";
  std::string group_column = "group";
  std::string default_group;

  void Attach(CLI::App* app) {
    app->add_option("--label-column", label_column, "CSV label column")->capture_default_str();
    app->add_option("--group-column", group_column, "CSV group column")->capture_default_str();
    app->add_option("--default-group", default_group, "group id used when the CSV has no group column");
  }

  CsvOptions ToCsv(const BoostModel& model) const {
    CsvOptions o;
    o.label_column = label_column;
    o.group_column = group_column;
    if (!default_group.empty()) o.default_group = default_group;
    o.class_names = model.class_names;
    return o;
  }
};

BoostModel LoadModel(const std::string& path) { return ModelFromJson(ReadJsonFile(path)); }

int CmdGen(const std::string& spec_path, const std::string& out, std::optional<std::uint64_t> seed,
           std::optional<std::uint64_t> n, bool no_other) {
  GeneratorSpec spec;
  if (spec_path.empty()) {
    spec = DefaultGeneratorSpec(!no_other);
  } else {
    spec = GeneratorSpecFromJson(ReadJsonFile(spec_path));
  }
  if (seed) spec.seed = *seed;
  if (n) spec.n = *n;
  spec.Validate();
  const GenerationResult result = GenerateDetailed(spec);
  fs::create_directories(out);
  SaveCsv(fs::path(out) / "dataset.csv", result.data);
  WriteJsonFile(fs::path(out) / "dataset.json", ToJson(result.data));
  WriteJsonFile(fs::path(out) / "schema.json", ToJson(result.data.schema()));

  const Json spec_json = ToJson(spec);
  Fnv1a h;
  h.Update(spec_json.dump());
  Json m;
  m["format"] = "fairboost.generation";
  m["version"] = kFormatVersion;
  m["seed"] = spec.seed;
  m["spec_hash"] = h.HexDigest();
  m["rng"] = Rng::kAlgorithm;
  m["n_rows"] = result.data.n_rows();
  m["data_fingerprint"] = result.data.Fingerprint();
  m["achieved_rates"] = Json(result.achieved_rates);
  m["intercepts"] = Json(result.intercepts);
  m["calibration_sweeps"] = result.calibration_sweeps;
  Json files = Json::array();
  for (const char* name : {"dataset.csv", "dataset.json", "schema.json"}) {
    files.push_back(Json{{"name", name}, {"fnv1a", FileDigest(fs::path(out) / name)}});
  }
  m["files"] = std::move(files);
  m["spec"] = spec_json;
  WriteJsonFile(fs::path(out) / "gen-manifest.json", m);
  std::cout << "wrote " << result.data.n_rows() << " rows to " << out << "\n";
  return 0;
}

int CmdRun(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
           bool verify) {
  Json doc = ReadJsonFile(config_path);
  const bool is_manifest = doc.value("format", "") == "fairboost.manifest";
  PipelineConfig config = PipelineConfigFromJson(doc);
  if (config.data.csv && config.data.csv->path.is_relative()) {
    config.data.csv->path = fs::absolute(fs::path(config_path).parent_path() / config.data.csv->path).lexically_normal();
  }
  if (seed) OverrideSeeds(config, *seed);
  const RunResult result = RunPipeline(config, out);
  std::cout << result.dir.string() << "\n";
  if (verify) {
    if (!is_manifest) {
      std::cerr << "fairboost run: --verify needs a manifest as input\n";
      return 2;
    }
    if (seed) {
      std::cerr << "fairboost run: --verify cannot be combined with --seed\n";
      return 2;
    }
    const auto bad = VerifyArtifacts(doc, result.dir);
    if (!bad.empty()) {
      for (const auto& b : bad) std::cerr << "fairboost run: artifact differs from manifest: " << b << "\n";
      return 3;
    }
    std::cout << "all " << doc.at("artifacts").size() << " artifacts match the manifest\n";
  }
  return 0;
}

int CmdCompare(const std::string& a, const std::string& b, const std::string& out) {
  const Comparison cmp = CompareReports(ReadJsonFile(a), ReadJsonFile(b));
  const std::string md = ComparisonMarkdown(cmp);
  if (!out.empty()) {
    fs::create_directories(out);
    WriteJsonFile(fs::path(out) / "comparison.json", ToJson(cmp));
    WriteTextFile(fs::path(out) / "comparison.md", md);
  }
  std::cout << md;
  return 0;
}

int CmdAudit(const std::string& model_path, const std::string& data_path, const DataOptions& data_opts,
             const std::string& out) {
  const BoostModel model = LoadModel(model_path);
  const Dataset test = LoadDatasetFile(data_path, model.schema, data_opts.ToCsv(model));
  AuditBundle bundle = AuditByGroup(model, test);
  if (!model.class_names.empty()) bundle.class_names = model.class_names;
  fs::create_directories(out);
  WriteJsonFile(fs::path(out) / "audit.json", ToJson(bundle));
  for (const auto& [g, r] : bundle.reports) {
    WriteConfusionFiles(out, g + "-confusion", r, bundle.class_names, bundle.training_group);
  }
  std::cout << ConfusionMarkdown(bundle.reports.at(kAllGroups), bundle.class_names);
  return 0;
}

BinningRule ParseBins(const std::string& text, double origin) {
  if (text.empty() || text == "auto") return BinningRule{};
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "spacing" && !arg.empty()) return BinningRule::Spacing(std::stod(arg), origin);
  if (kind == "equal_width" && !arg.empty()) return BinningRule::EqualWidth(std::stoi(arg));
  if (kind == "auto" && !arg.empty()) {
    BinningRule r;
    r.bins = std::stoi(arg);
    return r;
  }
  throw Error(ErrorCode::kConfig, "bins must be auto[:N], spacing:STEP or equal_width:N");
}

int CmdPdp(const std::string& model_path, const std::string& data_path, const DataOptions& data_opts,
           const std::string& feature, int cls, const std::string& bins, double origin, const std::string& out) {
  const BoostModel model = LoadModel(model_path);
  const Dataset data = LoadDatasetFile(data_path, model.schema, data_opts.ToCsv(model));
  const PdpCurve curve = PartialDependence(model, data, feature, ParseBins(bins, origin), cls);
  if (!out.empty()) {
    fs::create_directories(out);
    const std::string stem = "pdp-" + feature + "-" + std::to_string(cls);
    WriteJsonFile(fs::path(out) / (stem + ".json"), ToJson(curve));
    WriteTextFile(fs::path(out) / (stem + ".csv"), PdpCsv(curve));
  }
  std::cout << PdpCsv(curve);
  return 0;
}

int CmdImportance(const std::string& model_path, const std::string& out) {
  const ImportanceReport report = Importance(LoadModel(model_path));
  if (!out.empty()) {
    fs::create_directories(out);
    WriteJsonFile(fs::path(out) / "importance.json", ToJson(report));
    WriteTextFile(fs::path(out) / "importance.csv", ImportanceCsv(report));
  }
  std::cout << ImportanceCsv(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairboost: group-aware gradient boosting audits"};
  app.require_subcommand(1);

  std::string out;
  std::optional<std::uint64_t> seed;

  auto* gen = app.add_subcommand("gen", "generate a synthetic offender dataset");
  std::string spec_path;
  std::optional<std::uint64_t> gen_n;
  bool no_other = false;
  gen->add_option("--spec", spec_path, "generator spec JSON (default: built-in spec)");
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--seed", seed, "override the spec seed");
  gen->add_option("-n,--rows", gen_n, "override the number of rows");
  gen->add_flag("--no-other-group", no_other, "drop the 1% 'other' group from the built-in spec");

  auto* run = app.add_subcommand("run", "run a pipeline config or replay a manifest");
  std::string config_path;
  bool verify = false;
  run->add_option("config", config_path, "pipeline config or run manifest JSON")->required();
  run->add_option("--out", out, "output root directory")->required();
  run->add_option("--seed", seed, "derive all seeds from this value");
  run->add_flag("--verify", verify, "when replaying a manifest, check every artifact digest");

  auto* compare = app.add_subcommand("compare", "side-by-side disparity table for two reports");
  std::string report_a, report_b;
  compare->add_option("a", report_a, "audit bundle or confusion report JSON")->required();
  compare->add_option("b", report_b, "audit bundle or confusion report JSON")->required();
  compare->add_option("--out", out, "also write comparison.json/.md here");

  std::string model_path, data_path;
  DataOptions data_opts;

  auto* audit = app.add_subcommand("audit", "audit an existing model on new test data");
  audit->add_option("--model", model_path, "model JSON")->required();
  audit->add_option("--data", data_path, "test data (.json container or CSV)")->required();
  audit->add_option("--out", out, "output directory")->required();
  data_opts.Attach(audit);

  auto* pdp = app.add_subcommand("pdp", "partial dependence curve for one feature");
  std::string feature, bins;
  int cls = 0;
  double origin = 0.0;
  pdp->add_option("--model", model_path, "model JSON")->required();
  pdp->add_option("--data", data_path, "reference data (.json container or CSV)")->required();
  pdp->add_option("--feature", feature, "feature name")->required();
  pdp->add_option("--class", cls, "target class index")->capture_default_str();
  pdp->add_option("--bins", bins, "auto[:N], spacing:STEP or equal_width:N");
  pdp->add_option("--origin", origin, "first grid value for spacing bins")->capture_default_str();
  pdp->add_option("--out", out, "also write pdp JSON/CSV here");
  data_opts.Attach(pdp);

  auto* importance = app.add_subcommand("importance", "gain-share variable importance of a model");
  importance->add_option("--model", model_path, "model JSON")->required();
  importance->add_option("--out", out, "also write importance JSON/CSV here");

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*gen) return CmdGen(spec_path, out, seed, gen_n, no_other);
    if (*run) return CmdRun(config_path, out, seed, verify);
    if (*compare) return CmdCompare(report_a, report_b, out);
    if (*audit) return CmdAudit(model_path, data_path, data_opts, out);
    if (*pdp) return CmdPdp(model_path, data_path, data_opts, feature, cls, bins, origin, out);
    if (*importance) return CmdImportance(model_path, out);
  } catch (const StageError& e) {
    std::cerr << "fairboost " << name << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fairboost " << name << ": [" << name << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
