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

// JSON forms of every persisted object. Doubles are written with the
// shortest round-trip representation, so Parse(Dump(x)) == x bit for bit.
// Non-finite numbers, which JSON cannot hold, are written as null (NaN) or
// the strings "inf" / "-inf".
//
// Config-like objects (GbmConfig, GeneratorSpec, WeightPlan, TransformSpec,
// BinningRule) accept partial input: absent keys keep their defaults and
// unknown keys are rejected with kConfig.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fairboost/adjustments.h"
#include "fairboost/audit.h"
#include "fairboost/gbm.h"
#include "fairboost/interpret.h"
#include "fairboost/synthgen.h"
#include "fairboost/tabular.h"

namespace fairboost {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// Two-space indented text with a trailing newline.
std::string Dump(const Json& j);
// Throws kParse on malformed text.
Json ParseJson(const std::string& text);
// Throws kIo when the file cannot be read or written.
Json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const Json& j);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

Json ToJson(const Schema& schema);
Schema SchemaFromJson(const Json& j);

// {"format": "fairboost.dataset", "version": 1, schema, classes, columns}.
Json ToJson(const Dataset& data);
Dataset DatasetFromJson(const Json& j);

Json ToJson(const GbmConfig& config);
GbmConfig GbmConfigFromJson(const Json& j, const GbmConfig& base = {});

Json ToJson(const Tree& tree);
Tree TreeFromJson(const Json& j);

// {"format": "fairboost.model", ...}; flat node arrays per tree.
Json ToJson(const BoostModel& model);
BoostModel ModelFromJson(const Json& j);

Json ToJson(const ConfusionReport& report, const std::vector<std::string>& class_names = {});
ConfusionReport ConfusionFromJson(const Json& j);
Json ToJson(const GroupDisparity& d);
Json ToJson(const AuditBundle& bundle);
AuditBundle AuditBundleFromJson(const Json& j);

Json ToJson(const WeightPlan& plan);
WeightPlan WeightPlanFromJson(const Json& j);
Json ToJson(const TransformSpec& spec);
TransformSpec TransformSpecFromJson(const Json& j);
Json ToJson(const FeatureSelector& selector);
FeatureSelector FeatureSelectorFromJson(const Json& j);

Json ToJson(const GeneratorSpec& spec);
// {"preset": "default", "include_other_group": bool} starts from the default
// spec; any other key overrides the corresponding field.
GeneratorSpec GeneratorSpecFromJson(const Json& j);

Json ToJson(const ImportanceReport& report);
Json ToJson(const BinningRule& rule);
BinningRule BinningRuleFromJson(const Json& j);
Json ToJson(const PdpCurve& curve);
Json ToJson(const BootstrapResult& result);
Json ToJson(const RobustnessReport& report);

// Number or the non-finite encodings above.
Json NumberToJson(double v);
double NumberFromJson(const Json& j);

}  // namespace fairboost
