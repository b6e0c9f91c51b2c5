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

#include "fairboost/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "fairboost/rng.h"

namespace fairboost {
namespace {

void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw Error(ErrorCode::kConfig, "unknown key '" + it.key() + "' in " + std::string(what));
    }
  }
}

template <class T>
T Field(const Json& j, const char* key, const T& fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string(key) + ": " + e.what());
  }
}

Json OptionalString(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

std::optional<std::string> OptionalStringField(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return Field<std::string>(j, key, "");
}

std::string WeightModeName(WeightSource::Mode m) {
  switch (m) {
    case WeightSource::Mode::kNone: return "none";
    case WeightSource::Mode::kManual: return "manual";
    case WeightSource::Mode::kCalibrate: return "calibrate";
  }
  return "none";
}

std::string Two(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.2f", *v);
  return buf;
}

std::string TwoPlain(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

// File-name-safe form of a group or feature id.
std::string Slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

// Runs fn, converting library errors into StageError for `stage`.
template <class Fn>
auto Stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    throw StageError(stage, ErrorCode::kParse, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(stage, ErrorCode::kIo, e.what());
  }
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void Text(const std::string& name, const std::string& text) {
    WriteTextFile(dir_ / name, text);
    names_.insert(name);
  }
  void Json(const std::string& name, const fairboost::Json& j) { Text(name, Dump(j)); }
  void Add(const std::vector<std::string>& names) { names_.insert(names.begin(), names.end()); }

  std::vector<std::string> names() const { return {names_.begin(), names_.end()}; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::set<std::string> names_;
};

double DownweightFactor(const DownweightSpec& spec, const Dataset& train, const Dataset& full) {
  if (spec.factor) return *spec.factor;
  double target = 0.0;
  if (spec.target_share) {
    target = *spec.target_share;
  } else {
    const Dataset g = FilterGroup(full, *spec.match_group);
    target = g.ClassWeightTotals()[static_cast<std::size_t>(spec.cls)] / g.TotalWeight();
  }
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorCode::kDomain, "target class share must be in (0,1)");
  }
  const double in_class = train.ClassWeightTotals()[static_cast<std::size_t>(spec.cls)];
  const double rest = train.TotalWeight() - in_class;
  if (!(in_class > 0.0)) throw Error(ErrorCode::kDegenerateClass, "down-weighted class has no training weight");
  // f * in / (f * in + rest) = target.
  const double f = target * rest / ((1.0 - target) * in_class);
  return std::min(f, 1.0);
}

}  // namespace

// ---- config ----

PipelineConfig PipelineConfigFromJson(const Json& doc) {
  if (doc.is_object() && doc.value("format", "") == "fairboost.manifest") {
    return PipelineConfigFromJson(doc.at("config"));
  }
  CheckKeys(doc, {"data", "exclude_flags", "seeds", "gbm", "training_group", "weights", "downweight",
                  "transform", "audit", "interpret"},
            "pipeline config");
  PipelineConfig c;

  if (!doc.contains("data")) throw Error(ErrorCode::kConfig, "pipeline config needs a data source");
  const Json& data = doc.at("data");
  CheckKeys(data, {"generator", "csv"}, "data source");
  if (data.contains("generator") == data.contains("csv")) {
    throw Error(ErrorCode::kConfig, "data source must name exactly one of 'generator' and 'csv'");
  }
  if (data.contains("generator")) {
    c.data.generator = GeneratorSpecFromJson(data.at("generator"));
  } else {
    const Json& cj = data.at("csv");
    CheckKeys(cj, {"path", "schema", "label_column", "group_column", "default_group", "weight_column",
                   "row_id_column", "class_names", "n_classes"},
              "csv source");
    CsvSource src;
    src.path = Field<std::string>(cj, "path", "");
    if (src.path.empty()) throw Error(ErrorCode::kConfig, "csv source needs a path");
    if (!cj.contains("schema")) throw Error(ErrorCode::kConfig, "csv source needs a schema");
    src.schema = SchemaFromJson(cj.at("schema"));
    src.options.label_column = Field<std::string>(cj, "label_column", src.options.label_column);
    src.options.group_column = Field<std::string>(cj, "group_column", src.options.group_column);
    src.options.default_group = OptionalStringField(cj, "default_group");
    src.options.weight_column = Field<std::string>(cj, "weight_column", src.options.weight_column);
    src.options.row_id_column = Field<std::string>(cj, "row_id_column", src.options.row_id_column);
    src.options.class_names = Field<std::vector<std::string>>(cj, "class_names", {});
    if (cj.contains("n_classes") && !cj.at("n_classes").is_null()) {
      src.options.n_classes = Field<int>(cj, "n_classes", 0);
    }
    c.data.csv = std::move(src);
  }

  c.exclude = FlagSet::FromNames(Field<std::vector<std::string>>(doc, "exclude_flags", {}));

  if (doc.contains("seeds")) {
    const Json& s = doc.at("seeds");
    CheckKeys(s, {"split", "train", "audit"}, "seeds");
    c.seeds.split = Field<std::uint64_t>(s, "split", c.seeds.split);
    c.seeds.train = Field<std::uint64_t>(s, "train", c.seeds.train);
    c.seeds.audit = Field<std::uint64_t>(s, "audit", c.seeds.audit);
  }
  if (doc.contains("gbm")) c.gbm = GbmConfigFromJson(doc.at("gbm"));

  c.training_group = OptionalStringField(doc, "training_group");
  if (c.training_group == kAllGroups) c.training_group.reset();

  if (doc.contains("weights") && !doc.at("weights").is_null()) {
    const Json& w = doc.at("weights");
    CheckKeys(w, {"mode", "class_weights", "target", "max_iter", "tolerance"}, "weights");
    const auto mode = Field<std::string>(w, "mode", "none");
    if (mode == "none") {
      c.weights.mode = WeightSource::Mode::kNone;
    } else if (mode == "manual") {
      c.weights.mode = WeightSource::Mode::kManual;
      c.weights.class_weights = Field<std::vector<double>>(w, "class_weights", {});
    } else if (mode == "calibrate") {
      c.weights.mode = WeightSource::Mode::kCalibrate;
      if (w.contains("target") && !w.at("target").is_string() && !w.at("target").is_null()) {
        c.weights.target = Field<std::vector<std::vector<double>>>(w, "target", {});
      } else if (Field<std::string>(w, "target", "uniform") != "uniform") {
        throw Error(ErrorCode::kConfig, "cost target must be \"uniform\" or a K x K matrix");
      }
    } else {
      throw Error(ErrorCode::kConfig, "unknown weights mode '" + mode + "'");
    }
    c.weights.max_iter = Field<int>(w, "max_iter", c.weights.max_iter);
    c.weights.tolerance = Field<double>(w, "tolerance", c.weights.tolerance);
  }

  if (doc.contains("downweight") && !doc.at("downweight").is_null()) {
    const Json& d = doc.at("downweight");
    CheckKeys(d, {"class", "factor", "target_share", "match_group"}, "downweight");
    DownweightSpec spec;
    spec.cls = Field<int>(d, "class", -1);
    if (d.contains("factor") && !d.at("factor").is_null()) spec.factor = Field<double>(d, "factor", 1.0);
    if (d.contains("target_share") && !d.at("target_share").is_null()) {
      spec.target_share = Field<double>(d, "target_share", 0.0);
    }
    spec.match_group = OptionalStringField(d, "match_group");
    const int set = int(spec.factor.has_value()) + int(spec.target_share.has_value()) +
                    int(spec.match_group.has_value());
    if (set != 1) {
      throw Error(ErrorCode::kConfig, "downweight needs exactly one of factor, target_share, match_group");
    }
    c.downweight = std::move(spec);
  }

  if (doc.contains("transform") && !doc.at("transform").is_null()) {
    c.transform = TransformSpecFromJson(doc.at("transform"));
  }

  if (doc.contains("audit")) {
    const Json& a = doc.at("audit");
    CheckKeys(a, {"baselines", "bootstrap", "robustness"}, "audit options");
    for (const auto& name : Field<std::vector<std::string>>(a, "baselines", {})) {
      c.baselines.push_back(ParseBaselineKind(name));
    }
    if (a.contains("bootstrap") && !a.at("bootstrap").is_null()) {
      const Json& b = a.at("bootstrap");
      CheckKeys(b, {"statistics", "replicates", "level"}, "bootstrap options");
      BootstrapOptions opts;
      for (const auto& s : Field<std::vector<std::string>>(b, "statistics", {})) {
        opts.statistics.push_back(MetricSelector::Parse(s));
      }
      opts.replicates = Field<int>(b, "replicates", opts.replicates);
      opts.level = Field<double>(b, "level", opts.level);
      c.bootstrap = std::move(opts);
    }
    if (a.contains("robustness") && !a.at("robustness").is_null()) {
      const Json& r = a.at("robustness");
      CheckKeys(r, {"grid", "split_seeds", "threshold"}, "robustness options");
      RobustnessConfig rc;
      if (r.contains("grid")) {
        for (const auto& g : r.at("grid")) rc.grid.push_back(GbmConfigFromJson(g, c.gbm));
      }
      rc.split_seeds = Field<std::vector<std::uint64_t>>(r, "split_seeds", {});
      rc.threshold = Field<double>(r, "threshold", rc.threshold);
      c.robustness = std::move(rc);
    }
  }

  if (doc.contains("interpret")) {
    const Json& in = doc.at("interpret");
    CheckKeys(in, {"importance", "pdp"}, "interpret options");
    c.importance = Field<bool>(in, "importance", true);
    if (in.contains("pdp")) {
      for (const auto& p : in.at("pdp")) {
        CheckKeys(p, {"feature", "class", "bins"}, "pdp request");
        PdpRequest req;
        req.feature = Field<std::string>(p, "feature", "");
        req.cls = Field<int>(p, "class", 0);
        if (p.contains("bins")) req.bins = BinningRuleFromJson(p.at("bins"));
        c.pdp.push_back(std::move(req));
      }
    }
  }
  return c;
}

Json ToJson(const PipelineConfig& c) {
  Json j;
  if (c.data.generator) {
    j["data"] = Json{{"generator", ToJson(*c.data.generator)}};
  } else if (c.data.csv) {
    const CsvSource& s = *c.data.csv;
    Json cj;
    cj["path"] = s.path.string();
    cj["schema"] = ToJson(s.schema);
    cj["label_column"] = s.options.label_column;
    cj["group_column"] = s.options.group_column;
    cj["default_group"] = OptionalString(s.options.default_group);
    cj["weight_column"] = s.options.weight_column;
    cj["row_id_column"] = s.options.row_id_column;
    cj["class_names"] = s.options.class_names;
    cj["n_classes"] = s.options.n_classes ? Json(*s.options.n_classes) : Json(nullptr);
    j["data"] = Json{{"csv", cj}};
  }
  j["exclude_flags"] = c.exclude.Names();
  j["seeds"] = Json{{"split", c.seeds.split}, {"train", c.seeds.train}, {"audit", c.seeds.audit}};
  j["gbm"] = ToJson(c.gbm);
  j["training_group"] = OptionalString(c.training_group);

  Json w{{"mode", WeightModeName(c.weights.mode)}};
  if (c.weights.mode == WeightSource::Mode::kManual) w["class_weights"] = c.weights.class_weights;
  if (c.weights.mode == WeightSource::Mode::kCalibrate) {
    w["target"] = c.weights.target.empty() ? Json("uniform") : Json(c.weights.target);
    w["max_iter"] = c.weights.max_iter;
    w["tolerance"] = c.weights.tolerance;
  }
  j["weights"] = std::move(w);

  if (c.downweight) {
    const auto& d = *c.downweight;
    Json dj{{"class", d.cls}};
    if (d.factor) dj["factor"] = *d.factor;
    if (d.target_share) dj["target_share"] = *d.target_share;
    if (d.match_group) dj["match_group"] = *d.match_group;
    j["downweight"] = std::move(dj);
  } else {
    j["downweight"] = nullptr;
  }
  j["transform"] = c.transform ? ToJson(*c.transform) : Json(nullptr);

  Json audit;
  Json baselines = Json::array();
  for (auto b : c.baselines) baselines.push_back(BaselineKindName(b));
  audit["baselines"] = std::move(baselines);
  if (c.bootstrap) {
    Json stats = Json::array();
    for (const auto& s : c.bootstrap->statistics) stats.push_back(s.ToString());
    audit["bootstrap"] = Json{{"statistics", std::move(stats)},
                              {"replicates", c.bootstrap->replicates},
                              {"level", c.bootstrap->level}};
  } else {
    audit["bootstrap"] = nullptr;
  }
  if (c.robustness) {
    Json grid = Json::array();
    for (const auto& g : c.robustness->grid) grid.push_back(ToJson(g));
    audit["robustness"] = Json{{"grid", std::move(grid)},
                               {"split_seeds", c.robustness->split_seeds},
                               {"threshold", c.robustness->threshold}};
  } else {
    audit["robustness"] = nullptr;
  }
  j["audit"] = std::move(audit);

  Json pdp = Json::array();
  for (const auto& p : c.pdp) pdp.push_back(Json{{"feature", p.feature}, {"class", p.cls}, {"bins", ToJson(p.bins)}});
  j["interpret"] = Json{{"importance", c.importance}, {"pdp", std::move(pdp)}};
  return j;
}

void OverrideSeeds(PipelineConfig& config, std::uint64_t seed) {
  if (config.data.generator) config.data.generator->seed = seed;
  config.seeds.split = MixSeed(seed, 1);
  config.seeds.train = MixSeed(seed, 2);
  config.seeds.audit = MixSeed(seed, 3);
}

std::string RunId(const PipelineConfig& config) {
  Fnv1a h;
  h.Update(ToJson(config).dump());
  return "run-" + h.HexDigest();
}

// ---- helpers ----

std::string FileDigest(const std::filesystem::path& path) {
  Fnv1a h;
  h.Update(ReadTextFile(path));
  return h.HexDigest();
}

std::vector<std::string> VerifyArtifacts(const Json& manifest, const std::filesystem::path& dir) {
  std::vector<std::string> bad;
  for (const auto& a : manifest.at("artifacts")) {
    const auto name = a.at("name").get<std::string>();
    const auto path = dir / name;
    if (!std::filesystem::exists(path) || FileDigest(path) != a.at("fnv1a").get<std::string>()) {
      bad.push_back(name);
    }
  }
  return bad;
}

Dataset ProjectToSchema(const Dataset& data, const Schema& schema) {
  if (data.schema() == schema) return data;
  std::vector<std::size_t> cols;
  for (const auto& f : schema.features()) {
    const std::size_t c = data.schema().Require(f.name);
    if (data.schema().feature(c).kind != f.kind) {
      throw Error(ErrorCode::kSchema, "feature '" + f.name + "' has a different kind in the data");
    }
    cols.push_back(c);
  }
  std::vector<double> x;
  x.reserve(data.n_rows() * cols.size());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t c : cols) x.push_back(data.feature(i, c));
  }
  return Dataset(schema, data.n_classes(), std::move(x), {data.labels().begin(), data.labels().end()},
                 data.groups(), {data.weights().begin(), data.weights().end()},
                 {data.row_ids().begin(), data.row_ids().end()}, data.class_names());
}

Dataset LoadDatasetFile(const std::filesystem::path& path, const Schema& schema, const CsvOptions& options) {
  if (path.extension() == ".json") return ProjectToSchema(DatasetFromJson(ReadJsonFile(path)), schema);
  return LoadCsv(path, schema, options);
}

std::vector<std::string> WriteConfusionFiles(const std::filesystem::path& dir, const std::string& stem,
                                             const ConfusionReport& report,
                                             const std::vector<std::string>& class_names,
                                             const std::optional<std::string>& training_group) {
  Json j = ToJson(report, class_names);
  j["training_group"] = OptionalString(training_group);
  std::string md = ConfusionMarkdown(report, class_names);
  md = "Group: " + report.group + " (training group: " + training_group.value_or(kAllGroups) + ")\n\n" + md;
  WriteJsonFile(dir / (stem + ".json"), j);
  WriteTextFile(dir / (stem + ".md"), md);
  WriteTextFile(dir / (stem + ".csv"), ConfusionCsv(report, class_names));
  return {stem + ".json", stem + ".md", stem + ".csv"};
}

// ---- run ----

RunResult RunPipeline(const PipelineConfig& config, const std::filesystem::path& out_root) {
  RunResult result;
  result.run_id = RunId(config);
  result.dir = out_root / result.run_id;
  Stage("output", [&] {
    std::filesystem::create_directories(result.dir);
    return 0;
  });
  ArtifactWriter out(result.dir);
  std::vector<std::string> stages;
  Json notes = Json::array();
  auto begin = [&](const char* name) { stages.emplace_back(name); };

  begin("load");
  const Dataset loaded = Stage("load", [&] {
    if (config.data.generator) return Generate(*config.data.generator);
    if (config.data.csv) return LoadCsv(config.data.csv->path, config.data.csv->schema, config.data.csv->options);
    throw Error(ErrorCode::kConfig, "no data source");
  });

  begin("exclude");
  const Dataset data = Stage("exclude", [&] { return ApplyExclusions(loaded, config.exclude); });

  begin("split");
  const SplitPair split = Stage("split", [&] { return SplitEqual(data, config.seeds.split); });

  begin("select");
  Dataset train = Stage("select", [&] {
    return config.training_group ? FilterGroup(split.train, *config.training_group) : split.train;
  });

  GbmConfig gbm = config.gbm;
  gbm.seed = config.seeds.train;
  Stage("train", [&] {
    if (gbm.n_classes != data.n_classes()) {
      throw Error(ErrorCode::kConfig, "gbm n_classes is " + std::to_string(gbm.n_classes) + " but the data has " +
                                          std::to_string(data.n_classes()) + " classes");
    }
    gbm.Validate();
    return 0;
  });

  begin("weights");
  WeightPlan plan = Stage("weights", [&] {
    switch (config.weights.mode) {
      case WeightSource::Mode::kNone:
        return WeightPlan::Manual(std::vector<double>(static_cast<std::size_t>(data.n_classes()), 1.0));
      case WeightSource::Mode::kManual: {
        WeightPlan p = WeightPlan::Manual(config.weights.class_weights);
        p.Validate(data.n_classes());
        return p;
      }
      case WeightSource::Mode::kCalibrate: {
        const auto target =
            config.weights.target.empty() ? UniformCostTarget(data.n_classes()) : config.weights.target;
        return CalibrateCostRatios(train, gbm, target, config.weights.max_iter, config.weights.tolerance);
      }
    }
    throw Error(ErrorCode::kConfig, "unknown weights mode");
  });
  if (plan.calibration && !plan.calibration->converged) {
    notes.push_back("cost-ratio calibration did not converge; best iterate used");
  }
  train = Stage("weights", [&] { return ApplyWeightPlan(train, plan); });

  std::optional<double> downweight_factor;
  if (config.downweight) {
    begin("downweight");
    train = Stage("downweight", [&] {
      const double f = DownweightFactor(*config.downweight, train, data);
      downweight_factor = f;
      return DownweightClass(train, config.downweight->cls, f);
    });
  }
  result.weight_plan = plan;
  {
    Json pj = ToJson(plan);
    if (config.downweight) {
      pj["downweight"] = Json{{"class", config.downweight->cls}, {"factor", *downweight_factor}};
      std::vector<double> effective = plan.class_weights;
      effective[static_cast<std::size_t>(config.downweight->cls)] *= *downweight_factor;
      pj["effective_class_weights"] = effective;
    } else {
      pj["downweight"] = nullptr;
      pj["effective_class_weights"] = plan.class_weights;
    }
    out.Json("weight_plan.json", pj);
  }

  begin("train");
  result.model = Stage("train", [&] {
    // The model must never see a test row.
    std::unordered_set<std::uint64_t> test_ids(split.test.row_ids().begin(), split.test.row_ids().end());
    for (std::uint64_t id : train.row_ids()) {
      if (test_ids.contains(id)) throw Error(ErrorCode::kConfig, "training rows overlap the test rows");
    }
    BoostModel m = Train(train, gbm);
    m.training_group = config.training_group;
    m.training_rows_fingerprint = train.RowIdFingerprint();
    return m;
  });
  out.Json("model.json", ToJson(result.model));

  Dataset test = split.test;
  if (config.transform) {
    begin("transform");
    test = Stage("transform", [&] { return ApplyTransform(test, *config.transform); });
  }

  begin("audit");
  result.audit = Stage("audit", [&] {
    AuditBundle b = AuditByGroup(result.model, test);
    if (b.test_rows_fingerprint == result.model.training_rows_fingerprint) {
      throw Error(ErrorCode::kConfig, "audit rows coincide with training rows");
    }
    return b;
  });
  Stage("audit", [&] {
    out.Json("audit.json", ToJson(result.audit));
    for (const auto& [g, r] : result.audit.reports) {
      out.Add(WriteConfusionFiles(result.dir, Slug(g) + "-confusion", r, result.audit.class_names,
                                  result.audit.training_group));
    }
    std::ostringstream md;
    md << "Disparities (first group minus second)\n\n| Group A | Group B | Class | Predicted share diff | "
          "Prediction error diff |\n|---|---|---|---|---|\n";
    for (const auto& d : result.audit.disparities) {
      for (std::size_t k = 0; k < d.predicted_share_diff.size(); ++k) {
        const std::string cname = k < result.audit.class_names.size() ? result.audit.class_names[k] : std::to_string(k);
        md << "| " << d.group_a << " | " << d.group_b << " | " << cname << " | " << Two(d.predicted_share_diff[k])
           << " | " << Two(d.col_error_diff[k]) << " |\n";
      }
    }
    out.Text("disparities.md", md.str());
    return 0;
  });

  if (!config.baselines.empty()) {
    begin("baselines");
    Stage("baselines", [&] {
      Json bj = Json::object();
      for (std::size_t i = 0; i < config.baselines.size(); ++i) {
        BaselinePolicy policy{config.baselines[i], MixSeed(config.seeds.audit, 1000 + i)};
        const ConfusionReport r = ApplyBaselinePolicy(policy, test.labels(), test.n_classes(), test.weights());
        Json rj = ToJson(r, test.class_names());
        rj["seed"] = policy.seed;
        bj[std::string(BaselineKindName(config.baselines[i]))] = std::move(rj);
      }
      out.Json("baselines.json", Json{{"format", "fairboost.baselines"}, {"version", kFormatVersion}, {"baselines", bj}});
      return 0;
    });
  }

  if (config.bootstrap) {
    begin("bootstrap");
    Stage("bootstrap", [&] {
      Json results = Json::array();
      for (std::size_t i = 0; i < config.bootstrap->statistics.size(); ++i) {
        const MetricSelector& sel = config.bootstrap->statistics[i];
        const auto report = result.audit.reports.find(sel.group);
        if (report != result.audit.reports.end() && !EvaluateMetric(report->second, sel)) {
          notes.push_back("bootstrap of " + sel.ToString() + " skipped: undefined on the test rows");
          continue;
        }
        results.push_back(ToJson(BootstrapCi(test, result.model, sel,
                                             config.bootstrap->replicates, config.bootstrap->level,
                                             MixSeed(config.seeds.audit, i))));
      }
      out.Json("bootstrap.json", Json{{"format", "fairboost.bootstrap"}, {"version", kFormatVersion}, {"results", results}});
      return 0;
    });
  }

  if (config.robustness) {
    begin("robustness");
    Stage("robustness", [&] {
      RobustnessOptions opts;
      opts.grid = config.robustness->grid;
      if (opts.grid.empty()) opts.grid.push_back(gbm);
      opts.split_seeds = config.robustness->split_seeds;
      opts.training_group = config.training_group;
      opts.threshold = config.robustness->threshold;
      opts.class_weights = plan.class_weights;
      if (config.downweight) opts.class_weights[static_cast<std::size_t>(config.downweight->cls)] *= *downweight_factor;
      out.Json("robustness.json", ToJson(RobustnessHarness(data, opts)));
      return 0;
    });
  }

  begin("interpret");
  Stage("interpret", [&] {
    if (config.importance) {
      try {
        const ImportanceReport imp = Importance(result.model);
        out.Json("importance.json", ToJson(imp));
        out.Text("importance.csv", ImportanceCsv(imp));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateImportance && e.code() != ErrorCode::kConfig) throw;
        notes.push_back(std::string("importance skipped: ") + e.what());
      }
    }
    // Partial dependence is evaluated over the rows the model was trained on.
    for (const auto& req : config.pdp) {
      const PdpCurve curve = PartialDependence(result.model, train, req.feature, req.bins, req.cls);
      const std::string stem = "pdp-" + Slug(req.feature) + "-" + std::to_string(req.cls);
      out.Json(stem + ".json", ToJson(curve));
      out.Text(stem + ".csv", PdpCsv(curve));
    }
    return 0;
  });

  Json artifacts = Json::array();
  for (const auto& name : out.names()) {
    artifacts.push_back(Json{{"name", name}, {"fnv1a", FileDigest(result.dir / name)}});
  }
  Json m;
  m["format"] = "fairboost.manifest";
  m["version"] = kFormatVersion;
  m["run_id"] = result.run_id;
  m["config_hash"] = result.run_id.substr(4);
  m["rng"] = Rng::kAlgorithm;
  m["seeds"] = Json{{"split", config.seeds.split}, {"train", config.seeds.train}, {"audit", config.seeds.audit}};
  m["data_fingerprint"] = loaded.Fingerprint();
  m["train_rows_fingerprint"] = result.model.training_rows_fingerprint;
  m["test_rows_fingerprint"] = result.audit.test_rows_fingerprint;
  m["training_group"] = OptionalString(config.training_group);
  m["n_train_rows"] = train.n_rows();
  m["n_test_rows"] = test.n_rows();
  m["stages"] = stages;
  m["notes"] = std::move(notes);
  m["artifacts"] = std::move(artifacts);
  m["config"] = ToJson(config);
  Stage("output", [&] {
    WriteJsonFile(result.dir / "manifest.json", m);
    return 0;
  });
  result.manifest = std::move(m);
  result.artifacts = out.names();
  result.artifacts.push_back("manifest.json");
  std::sort(result.artifacts.begin(), result.artifacts.end());
  return result;
}

// ---- compare ----

Comparison CompareReports(const Json& a, const Json& b) {
  const auto fa = a.value("format", "");
  const auto fb = b.value("format", "");
  Comparison cmp;
  auto add = [&](const ConfusionReport& ra, const ConfusionReport& rb) {
    if (ra.n_classes != rb.n_classes) {
      throw Error(ErrorCode::kIncompatible, "reports have different numbers of classes");
    }
    const GroupDisparity d = Disparity(ra, rb);
    for (std::size_t k = 0; k < ra.predicted_shares.size(); ++k) {
      cmp.rows.push_back(ComparisonRow{ra.group, rb.group, static_cast<int>(k), ra.predicted_shares[k],
                                       rb.predicted_shares[k], d.predicted_share_diff[k], ra.col_errors[k],
                                       rb.col_errors[k], d.col_error_diff[k]});
    }
  };
  if (fa == "fairboost.audit" && fb == "fairboost.audit") {
    const AuditBundle ba = AuditBundleFromJson(a);
    const AuditBundle bb = AuditBundleFromJson(b);
    std::vector<std::string> ga, gb;
    for (const auto& [g, _] : ba.reports) ga.push_back(g);
    for (const auto& [g, _] : bb.reports) gb.push_back(g);
    if (ga != gb) throw Error(ErrorCode::kIncompatible, "audit bundles cover different groups");
    if (ba.class_names.size() != bb.class_names.size()) {
      throw Error(ErrorCode::kIncompatible, "audit bundles have different numbers of classes");
    }
    cmp.class_names = ba.class_names;
    for (const auto& g : ga) add(ba.reports.at(g), bb.reports.at(g));
  } else if (fa == "fairboost.confusion" && fb == "fairboost.confusion") {
    const ConfusionReport ra = ConfusionFromJson(a);
    const ConfusionReport rb = ConfusionFromJson(b);
    cmp.class_names = a.value("class_names", std::vector<std::string>{});
    add(ra, rb);
  } else {
    throw Error(ErrorCode::kIncompatible,
                "compare needs two audit bundles or two confusion reports (got '" + fa + "' and '" + fb + "')");
  }
  if (cmp.class_names.empty()) {
    const int k = cmp.rows.empty() ? 0 : cmp.rows.back().cls + 1;
    for (int i = 0; i < k; ++i) cmp.class_names.push_back(std::to_string(i));
  }
  return cmp;
}

Json ToJson(const Comparison& c) {
  auto opt = [](const std::optional<double>& v) { return v ? NumberToJson(*v) : Json(nullptr); };
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    rows.push_back(Json{{"group_a", r.group_a},
                        {"group_b", r.group_b},
                        {"class", r.cls},
                        {"predicted_share_a", r.share_a},
                        {"predicted_share_b", r.share_b},
                        {"predicted_share_diff", r.share_diff},
                        {"col_error_a", opt(r.col_error_a)},
                        {"col_error_b", opt(r.col_error_b)},
                        {"col_error_diff", opt(r.col_error_diff)}});
  }
  return Json{{"format", "fairboost.comparison"},
              {"version", kFormatVersion},
              {"class_names", c.class_names},
              {"rows", std::move(rows)}};
}

std::string ComparisonMarkdown(const Comparison& c) {
  std::ostringstream os;
  os << "| A | B | Class | Predicted share A | Predicted share B | Diff (A-B) | Prediction error A | "
        "Prediction error B | Diff (A-B) |\n|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : c.rows) {
    const std::string name =
        static_cast<std::size_t>(r.cls) < c.class_names.size() ? c.class_names[static_cast<std::size_t>(r.cls)]
                                                               : std::to_string(r.cls);
    os << "| " << r.group_a << " | " << r.group_b << " | " << name << " | " << TwoPlain(r.share_a) << " | "
       << TwoPlain(r.share_b) << " | " << Two(r.share_diff) << " | " << TwoPlain(r.col_error_a) << " | "
       << TwoPlain(r.col_error_b) << " | " << Two(r.col_error_diff) << " |\n";
  }
  return os.str();
}

}  // namespace fairboost
