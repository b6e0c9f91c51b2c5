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

#include "fairboost/json_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fairboost/error.h"
#include "fairboost/rng.h"

namespace fairboost {
namespace {

[[noreturn]] void Bad(const std::string& what) { throw Error(ErrorCode::kParse, what); }

const Json& At(const Json& j, const char* key) {
  if (!j.is_object()) Bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) Bad(std::string("missing key '") + key + "'");
  return *it;
}

template <class T>
T As(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    Bad(what + ": " + e.what());
  }
}

template <class T>
T Get(const Json& j, const char* key) {
  return As<T>(At(j, key), key);
}

// Overwrites out when key is present.
template <class T>
void Maybe(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = As<T>(*it, key);
}

void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw Error(ErrorCode::kConfig, "unknown key '" + it.key() + "' in " + std::string(what));
  }
}

void CheckFormat(const Json& j, std::string_view format) {
  const auto f = Get<std::string>(j, "format");
  if (f != format) Bad("expected format '" + std::string(format) + "', found '" + f + "'");
  const int v = Get<int>(j, "version");
  if (v != kFormatVersion) Bad("unsupported " + f + " version " + std::to_string(v));
}

Json Header(std::string_view format) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

Json Numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(NumberToJson(x));
  return a;
}

std::vector<double> NumbersFrom(const Json& j, const std::string& what) {
  if (!j.is_array()) Bad(what + ": expected an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(NumberFromJson(x));
  return v;
}

Json Matrix(const std::vector<std::vector<double>>& m) {
  Json a = Json::array();
  for (const auto& row : m) a.push_back(Numbers(row));
  return a;
}

std::vector<std::vector<double>> MatrixFrom(const Json& j, const std::string& what) {
  if (!j.is_array()) Bad(what + ": expected an array of rows");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) m.push_back(NumbersFrom(row, what));
  return m;
}

Json Optionals(const std::vector<std::optional<double>>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x ? NumberToJson(*x) : Json(nullptr));
  return a;
}

Json OptionalString(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

std::optional<std::string> OptionalStringFrom(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return As<std::string>(*it, key);
}

Json ToJson(const FeatureSpec& f) {
  return Json{{"name", f.name}, {"kind", FeatureKindName(f.kind)}, {"flags", f.flags.Names()}};
}

FeatureSpec FeatureSpecFrom(const Json& j) {
  FeatureSpec f;
  f.name = Get<std::string>(j, "name");
  f.kind = ParseFeatureKind(Get<std::string>(j, "kind"));
  if (j.contains("flags")) f.flags = FlagSet::FromNames(Get<std::vector<std::string>>(j, "flags"));
  return f;
}

std::string_view FamilyName(FeatureDistribution::Family f) {
  switch (f) {
    case FeatureDistribution::Family::kNegBinomial: return "neg_binomial";
    case FeatureDistribution::Family::kBernoulli: return "bernoulli";
    case FeatureDistribution::Family::kUniformInt: return "uniform_int";
  }
  return "neg_binomial";
}

FeatureDistribution::Family ParseFamily(const std::string& s) {
  if (s == "neg_binomial") return FeatureDistribution::Family::kNegBinomial;
  if (s == "bernoulli") return FeatureDistribution::Family::kBernoulli;
  if (s == "uniform_int") return FeatureDistribution::Family::kUniformInt;
  throw Error(ErrorCode::kConfig, "unknown distribution family '" + s + "'");
}

std::string_view ShapeName(Shape::Kind k) {
  switch (k) {
    case Shape::Kind::kLinear: return "linear";
    case Shape::Kind::kLog1p: return "log1p";
    case Shape::Kind::kPiecewise: return "piecewise";
  }
  return "linear";
}

Shape::Kind ParseShape(const std::string& s) {
  if (s == "linear") return Shape::Kind::kLinear;
  if (s == "log1p") return Shape::Kind::kLog1p;
  if (s == "piecewise") return Shape::Kind::kPiecewise;
  throw Error(ErrorCode::kConfig, "unknown shape '" + s + "'");
}

std::string_view OpName(TransformOp::Kind k) {
  switch (k) {
    case TransformOp::Kind::kSqrt: return "sqrt";
    case TransformOp::Kind::kScale: return "scale";
    case TransformOp::Kind::kRecode: return "recode";
  }
  return "sqrt";
}

std::string_view BinningName(BinningRule::Kind k) {
  switch (k) {
    case BinningRule::Kind::kAuto: return "auto";
    case BinningRule::Kind::kSpacing: return "spacing";
    case BinningRule::Kind::kEqualWidth: return "equal_width";
    case BinningRule::Kind::kExplicit: return "explicit";
  }
  return "auto";
}

std::string_view MetricName(MetricSelector::Metric m) {
  switch (m) {
    case MetricSelector::Metric::kPredictedShare: return "predicted_share";
    case MetricSelector::Metric::kColError: return "col_error";
    case MetricSelector::Metric::kRowError: return "row_error";
  }
  return "predicted_share";
}

}  // namespace

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

Json ParseJson(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Bad(std::string("malformed JSON: ") + e.what());
  }
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

Json ReadJsonFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Bad(path.string() + ": malformed JSON: " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& j) { WriteTextFile(path, Dump(j)); }

Json NumberToJson(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double NumberFromJson(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    Bad("expected a number, found \"" + s + "\"");
  }
  if (!j.is_number()) Bad("expected a number");
  return j.get<double>();
}

// ---- tabular ----

Json ToJson(const Schema& schema) {
  Json a = Json::array();
  for (const auto& f : schema.features()) a.push_back(ToJson(f));
  return a;
}

Schema SchemaFromJson(const Json& j) {
  const Json& list = j.is_object() ? At(j, "features") : j;
  if (!list.is_array()) Bad("schema must be an array of features");
  std::vector<FeatureSpec> specs;
  for (const auto& f : list) specs.push_back(FeatureSpecFrom(f));
  return Schema(std::move(specs));
}

Json ToJson(const Dataset& data) {
  Json j = Header("fairboost.dataset");
  j["schema"] = ToJson(data.schema());
  j["n_classes"] = data.n_classes();
  j["class_names"] = data.class_names();
  j["n_rows"] = data.n_rows();
  j["row_id"] = std::vector<std::uint64_t>(data.row_ids().begin(), data.row_ids().end());
  j["group"] = data.groups();
  j["label"] = std::vector<int>(data.labels().begin(), data.labels().end());
  j["weight"] = Numbers(data.weights());
  Json rows = Json::array();
  for (std::size_t i = 0; i < data.n_rows(); ++i) rows.push_back(Numbers(data.row(i)));
  j["features"] = std::move(rows);
  return j;
}

Dataset DatasetFromJson(const Json& j) {
  CheckFormat(j, "fairboost.dataset");
  Schema schema = SchemaFromJson(At(j, "schema"));
  const auto n = Get<std::size_t>(j, "n_rows");
  std::vector<double> features;
  features.reserve(n * schema.size());
  const Json& rows = At(j, "features");
  if (!rows.is_array() || rows.size() != n) Bad("features must hold n_rows rows");
  for (const auto& r : rows) {
    auto v = NumbersFrom(r, "features");
    if (v.size() != schema.size()) Bad("feature row width does not match the schema");
    features.insert(features.end(), v.begin(), v.end());
  }
  return Dataset(std::move(schema), Get<int>(j, "n_classes"), std::move(features),
                 Get<std::vector<int>>(j, "label"), Get<std::vector<std::string>>(j, "group"),
                 NumbersFrom(At(j, "weight"), "weight"), Get<std::vector<std::uint64_t>>(j, "row_id"),
                 Get<std::vector<std::string>>(j, "class_names"));
}

// ---- gbm ----

Json ToJson(const GbmConfig& c) {
  return Json{{"n_rounds", c.n_rounds},   {"learning_rate", c.learning_rate},
              {"max_depth", c.max_depth}, {"min_child_weight", c.min_child_weight},
              {"subsample", c.subsample}, {"n_classes", c.n_classes},
              {"seed", c.seed},           {"lambda", c.lambda}};
}

GbmConfig GbmConfigFromJson(const Json& j, const GbmConfig& base) {
  CheckKeys(j, {"n_rounds", "learning_rate", "max_depth", "min_child_weight", "subsample", "n_classes",
                "seed", "lambda"},
            "gbm config");
  GbmConfig c = base;
  Maybe(j, "n_rounds", c.n_rounds);
  Maybe(j, "learning_rate", c.learning_rate);
  Maybe(j, "max_depth", c.max_depth);
  Maybe(j, "min_child_weight", c.min_child_weight);
  Maybe(j, "subsample", c.subsample);
  Maybe(j, "n_classes", c.n_classes);
  Maybe(j, "seed", c.seed);
  Maybe(j, "lambda", c.lambda);
  return c;
}

Json ToJson(const Tree& tree) {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(),
       right = Json::array(), value = Json::array(), gain = Json::array(), cover = Json::array();
  for (const TreeNode& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(NumberToJson(n.threshold));
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(NumberToJson(n.value));
    gain.push_back(NumberToJson(n.gain));
    cover.push_back(NumberToJson(n.cover));
  }
  return Json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
              {"value", value},     {"gain", gain},           {"cover", cover}};
}

Tree TreeFromJson(const Json& j) {
  const auto feature = Get<std::vector<int>>(j, "feature");
  const auto left = Get<std::vector<int>>(j, "left");
  const auto right = Get<std::vector<int>>(j, "right");
  const auto threshold = NumbersFrom(At(j, "threshold"), "threshold");
  const auto value = NumbersFrom(At(j, "value"), "value");
  const auto gain = NumbersFrom(At(j, "gain"), "gain");
  const auto cover = NumbersFrom(At(j, "cover"), "cover");
  const std::size_t n = feature.size();
  if (left.size() != n || right.size() != n || threshold.size() != n || value.size() != n ||
      gain.size() != n || cover.size() != n) {
    Bad("tree node arrays have different lengths");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i], gain[i], cover[i]};
  }
  return Tree(std::move(nodes));
}

Json ToJson(const BoostModel& m) {
  Json j = Header("fairboost.model");
  j["config"] = ToJson(m.config);
  j["class_names"] = m.class_names;
  j["base_scores"] = Numbers(m.base_scores);
  j["schema"] = ToJson(m.schema);
  j["schema_fingerprint"] = m.schema.Fingerprint();
  j["training_group"] = OptionalString(m.training_group);
  j["training_rows_fingerprint"] = m.training_rows_fingerprint;
  Json rounds = Json::array();
  for (const auto& round : m.rounds) {
    Json trees = Json::array();
    for (const Tree& t : round) trees.push_back(ToJson(t));
    rounds.push_back(std::move(trees));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

BoostModel ModelFromJson(const Json& j) {
  CheckFormat(j, "fairboost.model");
  BoostModel m;
  m.config = GbmConfigFromJson(At(j, "config"));
  m.class_names = Get<std::vector<std::string>>(j, "class_names");
  m.base_scores = NumbersFrom(At(j, "base_scores"), "base_scores");
  m.schema = SchemaFromJson(At(j, "schema"));
  if (Get<std::string>(j, "schema_fingerprint") != m.schema.Fingerprint()) {
    Bad("model schema does not match its fingerprint");
  }
  m.training_group = OptionalStringFrom(j, "training_group");
  m.training_rows_fingerprint = Get<std::string>(j, "training_rows_fingerprint");
  const Json& rounds = At(j, "rounds");
  if (!rounds.is_array()) Bad("rounds must be an array");
  for (const auto& round : rounds) {
    std::vector<Tree> trees;
    for (const auto& t : round) trees.push_back(TreeFromJson(t));
    if (trees.size() != m.base_scores.size()) Bad("every round must hold one tree per class");
    for (const Tree& t : trees) {
      for (const TreeNode& n : t.nodes()) {
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= m.schema.size()) {
          Bad("tree splits on a feature outside the schema");
        }
      }
    }
    m.rounds.push_back(std::move(trees));
  }
  return m;
}

// ---- audit ----

Json ToJson(const ConfusionReport& r, const std::vector<std::string>& class_names) {
  Json j = Header("fairboost.confusion");
  j["group"] = r.group;
  j["n_classes"] = r.n_classes;
  if (!class_names.empty()) j["class_names"] = class_names;
  j["n"] = NumberToJson(r.n);
  j["counts"] = Matrix(r.counts);
  j["row_errors"] = Optionals(r.row_errors);
  j["col_errors"] = Optionals(r.col_errors);
  j["predicted_shares"] = Numbers(r.predicted_shares);
  j["observed_shares"] = Numbers(r.observed_shares);
  return j;
}

ConfusionReport ConfusionFromJson(const Json& j) {
  CheckFormat(j, "fairboost.confusion");
  ConfusionReport r = ConfusionFromCounts(MatrixFrom(At(j, "counts"), "counts"), Get<std::string>(j, "group"));
  if (Get<int>(j, "n_classes") != r.n_classes) Bad("n_classes does not match the count matrix");
  return r;
}

Json ToJson(const GroupDisparity& d) {
  return Json{{"group_a", d.group_a},
              {"group_b", d.group_b},
              {"predicted_share_diff", Numbers(d.predicted_share_diff)},
              {"col_error_diff", Optionals(d.col_error_diff)}};
}

Json ToJson(const AuditBundle& b) {
  Json j = Header("fairboost.audit");
  j["training_group"] = OptionalString(b.training_group);
  j["class_names"] = b.class_names;
  j["model_schema_fingerprint"] = b.model_schema_fingerprint;
  j["test_rows_fingerprint"] = b.test_rows_fingerprint;
  Json reports = Json::object();
  for (const auto& [g, r] : b.reports) {
    Json rj = ToJson(r, {});
    rj.erase("format");
    rj.erase("version");
    rj["training_group"] = OptionalString(b.training_group);
    reports[g] = std::move(rj);
  }
  j["reports"] = std::move(reports);
  Json d = Json::array();
  for (const auto& x : b.disparities) d.push_back(ToJson(x));
  j["disparities"] = std::move(d);
  return j;
}

AuditBundle AuditBundleFromJson(const Json& j) {
  CheckFormat(j, "fairboost.audit");
  AuditBundle b;
  b.training_group = OptionalStringFrom(j, "training_group");
  b.class_names = Get<std::vector<std::string>>(j, "class_names");
  b.model_schema_fingerprint = Get<std::string>(j, "model_schema_fingerprint");
  b.test_rows_fingerprint = Get<std::string>(j, "test_rows_fingerprint");
  const Json& reports = At(j, "reports");
  if (!reports.is_object()) Bad("reports must be an object keyed by group");
  std::vector<std::string> groups;
  for (auto it = reports.begin(); it != reports.end(); ++it) {
    b.reports.emplace(it.key(), ConfusionFromCounts(MatrixFrom(At(*it, "counts"), "counts"), it.key()));
    if (it.key() != kAllGroups) groups.push_back(it.key());
  }
  if (!b.reports.contains(kAllGroups)) Bad("audit bundle lacks the pooled 'all' report");
  std::sort(groups.begin(), groups.end());
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t c = a + 1; c < groups.size(); ++c) {
      b.disparities.push_back(Disparity(b.reports.at(groups[a]), b.reports.at(groups[c])));
    }
  }
  return b;
}

// ---- adjustments ----

Json ToJson(const WeightPlan& p) {
  Json j = Header("fairboost.weight_plan");
  j["class_weights"] = Numbers(p.class_weights);
  j["provenance"] = p.provenance == WeightPlan::Provenance::kManual ? "manual" : "calibrated";
  if (p.calibration) {
    const auto& c = *p.calibration;
    j["calibration"] = Json{{"target", Matrix(c.target)},
                            {"achieved", Matrix(c.achieved)},
                            {"iterations", c.iterations},
                            {"converged", c.converged},
                            {"tolerance", c.tolerance}};
  } else {
    j["calibration"] = nullptr;
  }
  return j;
}

WeightPlan WeightPlanFromJson(const Json& j) {
  CheckKeys(j, {"format", "version", "class_weights", "provenance", "calibration"}, "weight plan");
  WeightPlan p;
  p.class_weights = NumbersFrom(At(j, "class_weights"), "class_weights");
  const std::string prov = j.contains("provenance") ? Get<std::string>(j, "provenance") : "manual";
  if (prov == "manual") {
    p.provenance = WeightPlan::Provenance::kManual;
  } else if (prov == "calibrated") {
    p.provenance = WeightPlan::Provenance::kCalibrated;
  } else {
    throw Error(ErrorCode::kConfig, "unknown weight plan provenance '" + prov + "'");
  }
  if (auto it = j.find("calibration"); it != j.end() && !it->is_null()) {
    CostRatioCalibration c;
    c.target = MatrixFrom(At(*it, "target"), "target");
    c.achieved = MatrixFrom(At(*it, "achieved"), "achieved");
    c.iterations = Get<int>(*it, "iterations");
    c.converged = Get<bool>(*it, "converged");
    c.tolerance = Get<double>(*it, "tolerance");
    p.calibration = std::move(c);
  }
  return p;
}

Json ToJson(const FeatureSelector& s) { return Json{{"names", s.names}, {"flags", s.flags.Names()}}; }

FeatureSelector FeatureSelectorFromJson(const Json& j) {
  FeatureSelector s;
  if (j.is_string()) {
    s.names.push_back(j.get<std::string>());
    return s;
  }
  CheckKeys(j, {"names", "flags"}, "feature selector");
  Maybe(j, "names", s.names);
  if (j.contains("flags")) s.flags = FlagSet::FromNames(Get<std::vector<std::string>>(j, "flags"));
  return s;
}

Json ToJson(const TransformSpec& spec) {
  Json steps = Json::array();
  for (const auto& s : spec.steps) {
    Json op{{"kind", OpName(s.op.kind)}};
    if (s.op.kind == TransformOp::Kind::kScale) op["factor"] = s.op.factor;
    if (s.op.kind == TransformOp::Kind::kRecode) {
      op["from"] = s.op.from;
      op["to"] = s.op.to;
    }
    steps.push_back(Json{{"features", ToJson(s.features)}, {"group", OptionalString(s.group)}, {"op", op}});
  }
  return Json{{"steps", steps}};
}

TransformSpec TransformSpecFromJson(const Json& j) {
  CheckKeys(j, {"steps"}, "transform spec");
  TransformSpec spec;
  const Json& steps = At(j, "steps");
  if (!steps.is_array()) throw Error(ErrorCode::kConfig, "transform steps must be an array");
  for (const auto& s : steps) {
    CheckKeys(s, {"features", "group", "op"}, "transform step");
    TransformStep step;
    step.features = FeatureSelectorFromJson(At(s, "features"));
    step.group = OptionalStringFrom(s, "group");
    if (step.group == kAllGroups) step.group.reset();
    const Json& op = At(s, "op");
    CheckKeys(op, {"kind", "factor", "from", "to"}, "transform op");
    const auto kind = Get<std::string>(op, "kind");
    if (kind == "sqrt") {
      step.op = TransformOp::Sqrt();
    } else if (kind == "scale") {
      step.op = TransformOp::Scale(Get<double>(op, "factor"));
    } else if (kind == "recode") {
      step.op = TransformOp::Recode(Get<double>(op, "from"), Get<double>(op, "to"));
    } else {
      throw Error(ErrorCode::kConfig, "unknown transform op '" + kind + "'");
    }
    spec.steps.push_back(std::move(step));
  }
  return spec;
}

// ---- synthgen ----

Json ToJson(const GeneratorSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["seed"] = spec.seed;
  j["class_names"] = spec.class_names;
  j["group_proportions"] = Json(spec.group_proportions);
  j["base_rates"] = Json(spec.base_rates);
  Json features = Json::array();
  for (const auto& f : spec.features) {
    Json fj = ToJson(f.spec);
    Json d{{"family", FamilyName(f.dist.family)}, {"params", Json(f.dist.params)}, {"offset", f.dist.offset}};
    d["min"] = f.dist.min;
    d["max"] = f.dist.max;
    d["cap_by"] = OptionalString(f.dist.cap_by);
    fj["distribution"] = std::move(d);
    features.push_back(std::move(fj));
  }
  j["features"] = std::move(features);
  Json outcome = Json::array();
  for (const auto& t : spec.outcome) {
    Json shape{{"kind", ShapeName(t.shape.kind)}};
    if (t.shape.kind == Shape::Kind::kPiecewise) {
      shape["xs"] = t.shape.xs;
      shape["ys"] = t.shape.ys;
    }
    outcome.push_back(Json{{"feature", t.feature}, {"shape", shape}, {"coefficients", t.coefficients}});
  }
  j["outcome"] = std::move(outcome);
  j["calibration_tolerance"] = spec.calibration_tolerance;
  j["max_calibration_sweeps"] = spec.max_calibration_sweeps;
  return j;
}

GeneratorSpec GeneratorSpecFromJson(const Json& j) {
  CheckKeys(j, {"preset", "include_other_group", "n", "seed", "class_names", "group_proportions",
                "base_rates", "features", "outcome", "calibration_tolerance", "max_calibration_sweeps"},
            "generator spec");
  GeneratorSpec spec;
  if (j.contains("preset")) {
    const auto preset = Get<std::string>(j, "preset");
    if (preset != "default") throw Error(ErrorCode::kConfig, "unknown generator preset '" + preset + "'");
    bool other = true;
    Maybe(j, "include_other_group", other);
    spec = DefaultGeneratorSpec(other);
  }
  Maybe(j, "n", spec.n);
  Maybe(j, "seed", spec.seed);
  Maybe(j, "class_names", spec.class_names);
  Maybe(j, "group_proportions", spec.group_proportions);
  Maybe(j, "base_rates", spec.base_rates);
  Maybe(j, "calibration_tolerance", spec.calibration_tolerance);
  Maybe(j, "max_calibration_sweeps", spec.max_calibration_sweeps);
  if (auto it = j.find("features"); it != j.end()) {
    spec.features.clear();
    for (const auto& fj : *it) {
      GeneratedFeature f;
      f.spec = FeatureSpecFrom(fj);
      const Json& d = At(fj, "distribution");
      CheckKeys(d, {"family", "params", "offset", "min", "max", "cap_by"}, "feature distribution");
      f.dist.family = ParseFamily(Get<std::string>(d, "family"));
      f.dist.params = Get<std::map<std::string, std::vector<double>>>(d, "params");
      Maybe(d, "offset", f.dist.offset);
      Maybe(d, "min", f.dist.min);
      Maybe(d, "max", f.dist.max);
      f.dist.cap_by = OptionalStringFrom(d, "cap_by");
      spec.features.push_back(std::move(f));
    }
  }
  if (auto it = j.find("outcome"); it != j.end()) {
    spec.outcome.clear();
    for (const auto& tj : *it) {
      OutcomeTerm t;
      t.feature = Get<std::string>(tj, "feature");
      const Json& s = At(tj, "shape");
      t.shape.kind = ParseShape(Get<std::string>(s, "kind"));
      Maybe(s, "xs", t.shape.xs);
      Maybe(s, "ys", t.shape.ys);
      t.coefficients = Get<std::vector<double>>(tj, "coefficients");
      spec.outcome.push_back(std::move(t));
    }
  }
  spec.Validate();
  return spec;
}

// ---- interpret ----

Json ToJson(const ImportanceReport& r) {
  Json j = Header("fairboost.importance");
  Json f = Json::array();
  for (const auto& x : r.features) f.push_back(Json{{"feature", x.name}, {"share_percent", x.share}});
  j["features"] = std::move(f);
  return j;
}

Json ToJson(const BinningRule& rule) {
  Json j{{"kind", BinningName(rule.kind)}};
  switch (rule.kind) {
    case BinningRule::Kind::kAuto: j["bins"] = rule.bins; break;
    case BinningRule::Kind::kSpacing:
      j["step"] = rule.spacing;
      j["origin"] = rule.origin;
      break;
    case BinningRule::Kind::kEqualWidth: j["bins"] = rule.bins; break;
    case BinningRule::Kind::kExplicit: j["values"] = rule.values; break;
  }
  return j;
}

BinningRule BinningRuleFromJson(const Json& j) {
  CheckKeys(j, {"kind", "bins", "step", "origin", "values"}, "binning rule");
  BinningRule r;
  const std::string kind = j.contains("kind") ? Get<std::string>(j, "kind") : "auto";
  if (kind == "auto") {
    r.kind = BinningRule::Kind::kAuto;
  } else if (kind == "spacing") {
    r.kind = BinningRule::Kind::kSpacing;
  } else if (kind == "equal_width") {
    r.kind = BinningRule::Kind::kEqualWidth;
  } else if (kind == "explicit") {
    r.kind = BinningRule::Kind::kExplicit;
  } else {
    throw Error(ErrorCode::kConfig, "unknown binning kind '" + kind + "'");
  }
  Maybe(j, "bins", r.bins);
  Maybe(j, "step", r.spacing);
  Maybe(j, "origin", r.origin);
  Maybe(j, "values", r.values);
  return r;
}

Json ToJson(const PdpCurve& c) {
  Json j = Header("fairboost.pdp");
  j["feature"] = c.feature;
  j["target_class"] = c.target_class;
  j["binning"] = c.binning;
  j["logit_convention"] = c.logit_convention;
  j["averaging"] = "unweighted_rows";
  j["data_fingerprint"] = c.data_fingerprint;
  Json pts = Json::array();
  for (const auto& p : c.points) {
    pts.push_back(Json{{"value", p.value}, {"mean_probability", p.mean_probability}, {"logit", p.logit}});
  }
  j["points"] = std::move(pts);
  return j;
}

Json ToJson(const BootstrapResult& r) {
  return Json{{"statistic", r.statistic.ToString()},
              {"metric", MetricName(r.statistic.metric)},
              {"class", r.statistic.cls},
              {"group", r.statistic.group},
              {"point", r.point},
              {"lower", r.lower},
              {"upper", r.upper},
              {"level", r.level},
              {"replicates", r.replicates},
              {"redraws", r.redraws},
              {"seed", r.seed},
              {"method", "percentile"},
              {"rng", Rng::kAlgorithm}};
}

Json ToJson(const RobustnessReport& r) {
  Json j = Header("fairboost.robustness");
  j["threshold"] = r.threshold;
  j["split_seeds"] = r.split_seeds;
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json metrics = Json::array();
    for (const auto& m : c.metrics) {
      metrics.push_back(Json{{"metric", m.metric},
                             {"values", Numbers(m.values)},
                             {"min", m.min},
                             {"max", m.max},
                             {"mean", m.mean},
                             {"stddev", m.stddev},
                             {"range", m.range},
                             {"flagged", m.flagged}});
    }
    cells.push_back(Json{{"config_index", c.config_index}, {"metrics", std::move(metrics)}});
  }
  j["cells"] = std::move(cells);
  j["flagged"] = r.flagged;
  return j;
}

}  // namespace fairboost
