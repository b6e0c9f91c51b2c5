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

// Synthetic offender population.
//
// Every row draws from its own counter-based stream (seed, row), so output
// does not depend on generation order. Labels come from a multinomial logit
//
//   score_k(x) = intercept[group][k] + sum_terms coef_k * shape(x_feature)
//
// with class 0 as the reference (score 0). Per-group intercepts are tuned by
// coordinate bisection, holding each row's label uniform fixed, until the
// realised per-group label shares match the requested base rates.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairboost/tabular.h"

namespace fairboost {

// Group id "*" supplies parameters for groups without their own entry.
inline constexpr char kAnyGroup[] = "*";

struct FeatureDistribution {
  enum class Family { kNegBinomial, kBernoulli, kUniformInt };
  Family family = Family::kNegBinomial;
  // kNegBinomial: {r (integer >= 1), mean}; kBernoulli: {p};
  // kUniformInt: {lo, hi} inclusive.
  std::map<std::string, std::vector<double>> params;
  double offset = 0.0;
  double min = -1e300;
  double max = 1e300;
  // Clamp to the value of an earlier feature (age at first charge <= age).
  std::optional<std::string> cap_by;

  const std::vector<double>& ParamsFor(const std::string& group) const;
  friend bool operator==(const FeatureDistribution&, const FeatureDistribution&) = default;
};

struct GeneratedFeature {
  FeatureSpec spec;
  FeatureDistribution dist;

  friend bool operator==(const GeneratedFeature&, const GeneratedFeature&) = default;
};

// Shape function applied to a feature before its class coefficients.
struct Shape {
  enum class Kind { kLinear, kLog1p, kPiecewise };
  Kind kind = Kind::kLinear;
  // kPiecewise: linear interpolation through (xs, ys), flat outside.
  std::vector<double> xs;
  std::vector<double> ys;

  double Eval(double x) const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

struct OutcomeTerm {
  std::string feature;
  Shape shape;
  std::vector<double> coefficients;  // one per class; entry 0 is ignored

  friend bool operator==(const OutcomeTerm&, const OutcomeTerm&) = default;
};

struct GeneratorSpec {
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::map<std::string, double> group_proportions;
  std::map<std::string, std::vector<double>> base_rates;  // per group, sums to 1
  std::vector<GeneratedFeature> features;
  std::vector<OutcomeTerm> outcome;
  double calibration_tolerance = 0.0005;
  int max_calibration_sweeps = 200;

  int n_classes() const { return static_cast<int>(class_names.size()); }
  Schema schema() const;
  // Throws kConfig on any violated invariant.
  void Validate() const;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

// Three outcome classes, groups W/B/other at 0.32/0.67/0.01, reference base
// rates for W and B; the "other" group uses the pooled rates. Dropping it
// renormalises W and B.
GeneratorSpec DefaultGeneratorSpec(bool include_other_group = true);

struct GenerationResult {
  Dataset data;
  std::map<std::string, std::vector<double>> intercepts;
  std::map<std::string, std::vector<double>> achieved_rates;
  int calibration_sweeps = 0;
};

// Throws kCalibration (with achieved rates) when the intercepts cannot be
// tuned within max_calibration_sweeps.
GenerationResult GenerateDetailed(const GeneratorSpec& spec);
Dataset Generate(const GeneratorSpec& spec);

// The fixed uniform used to draw row `row`'s label.
double LabelUniform(std::uint64_t seed, std::uint64_t row);

// Class scores for one feature vector (schema order) and group intercepts.
std::vector<double> OutcomeScores(const GeneratorSpec& spec, std::span<const double> x,
                                  std::span<const double> intercepts);

// Smallest k with u < p_0 + ... + p_k (the last class otherwise).
int DrawLabel(std::span<const double> probabilities, double u);

}  // namespace fairboost
