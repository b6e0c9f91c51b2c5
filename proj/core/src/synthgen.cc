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

#include "fairboost/synthgen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairboost/error.h"
#include "fairboost/gbm.h"
#include "fairboost/rng.h"

namespace fairboost {
namespace {

constexpr std::uint64_t kLabelStream = 0x6c6162656c5f7532ULL;

std::string RatesToString(const std::map<std::string, std::vector<double>>& rates) {
  std::string s;
  for (const auto& [g, r] : rates) {
    s += g + "=(";
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(r[k]);
    }
    s += ") ";
  }
  return s;
}

GeneratedFeature Feature(std::string name, FeatureKind kind, FlagSet flags,
                         FeatureDistribution dist) {
  return GeneratedFeature{FeatureSpec{std::move(name), kind, flags}, std::move(dist)};
}

FeatureDistribution NegBin(double r, double mean_w, double mean_b, double mean_other,
                           double offset = 0.0) {
  FeatureDistribution d;
  d.family = FeatureDistribution::Family::kNegBinomial;
  d.params = {{"W", {r, mean_w}}, {"B", {r, mean_b}}, {kAnyGroup, {r, mean_other}}};
  d.offset = offset;
  d.min = 0.0;
  return d;
}

FeatureDistribution Bern(double p_w, double p_b, double p_other) {
  FeatureDistribution d;
  d.family = FeatureDistribution::Family::kBernoulli;
  d.params = {{"W", {p_w}}, {"B", {p_b}}, {kAnyGroup, {p_other}}};
  return d;
}

Shape Piecewise(std::vector<double> xs, std::vector<double> ys) {
  return Shape{Shape::Kind::kPiecewise, std::move(xs), std::move(ys)};
}

}  // namespace

const std::vector<double>& FeatureDistribution::ParamsFor(const std::string& group) const {
  if (auto it = params.find(group); it != params.end()) return it->second;
  if (auto it = params.find(kAnyGroup); it != params.end()) return it->second;
  throw Error(ErrorCode::kConfig, "no distribution parameters for group '" + group + "'");
}

double Shape::Eval(double x) const {
  switch (kind) {
    case Kind::kLinear: return x;
    case Kind::kLog1p: return std::log1p(std::max(x, 0.0));
    case Kind::kPiecewise: {
      if (x <= xs.front()) return ys.front();
      if (x >= xs.back()) return ys.back();
      const auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - xs.begin());
      const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
      return ys[j - 1] + t * (ys[j] - ys[j - 1]);
    }
  }
  return x;
}

Schema GeneratorSpec::schema() const {
  std::vector<FeatureSpec> specs;
  for (const auto& f : features) specs.push_back(f.spec);
  return Schema(std::move(specs));
}

void GeneratorSpec::Validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfig, "generator spec: " + m); };
  if (class_names.size() < 2) fail("need at least 2 classes");
  if (group_proportions.empty()) fail("no groups");
  double total = 0.0;
  for (const auto& [g, p] : group_proportions) {
    if (g == kAnyGroup || g == "all") fail("reserved group id '" + g + "'");
    if (!(p >= 0.0)) fail("negative proportion for group " + g);
    total += p;
    auto it = base_rates.find(g);
    if (it == base_rates.end()) fail("no base rates for group " + g);
    if (it->second.size() != class_names.size()) fail("base rates for " + g + " have wrong length");
    double s = 0.0;
    for (double r : it->second) {
      if (!(r > 0.0)) fail("base rates must be positive");
      s += r;
    }
    if (std::abs(s - 1.0) > 1e-9) fail("base rates for " + g + " do not sum to 1");
  }
  if (std::abs(total - 1.0) > 1e-9) fail("group proportions do not sum to 1");
  const Schema s = schema();
  if (s.empty()) fail("no features");
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& d = features[f].dist;
    for (const auto& [g, p] : d.params) {
      switch (d.family) {
        case FeatureDistribution::Family::kNegBinomial:
          if (p.size() != 2 || !(p[0] >= 1.0) || std::floor(p[0]) != p[0] || !(p[1] >= 0.0)) {
            fail("negative binomial needs integer r >= 1 and mean >= 0 for " + features[f].spec.name);
          }
          break;
        case FeatureDistribution::Family::kBernoulli:
          if (p.size() != 1 || !(p[0] >= 0.0 && p[0] <= 1.0)) fail("bad bernoulli p for " + features[f].spec.name);
          break;
        case FeatureDistribution::Family::kUniformInt:
          if (p.size() != 2 || !(p[0] <= p[1])) fail("bad uniform_int range for " + features[f].spec.name);
          break;
      }
    }
    for (const auto& [g, _] : group_proportions) (void)d.ParamsFor(g);
    if (d.cap_by) {
      auto idx = s.IndexOf(*d.cap_by);
      if (!idx || *idx >= f) fail("cap_by must name an earlier feature");
    }
    if (!(d.min <= d.max)) fail("min > max for " + features[f].spec.name);
  }
  for (const auto& t : outcome) {
    if (!s.IndexOf(t.feature)) fail("outcome term on unknown feature " + t.feature);
    if (t.coefficients.size() != class_names.size()) fail("outcome coefficients have wrong length");
    if (t.shape.kind == Shape::Kind::kPiecewise) {
      if (t.shape.xs.size() < 2 || t.shape.xs.size() != t.shape.ys.size()) fail("bad piecewise shape");
      for (std::size_t i = 1; i < t.shape.xs.size(); ++i) {
        if (!(t.shape.xs[i] > t.shape.xs[i - 1])) fail("piecewise knots must increase");
      }
    }
  }
  if (!(calibration_tolerance > 0.0)) fail("calibration tolerance must be positive");
  if (max_calibration_sweeps < 1) fail("max_calibration_sweeps must be positive");
}

GeneratorSpec DefaultGeneratorSpec(bool include_other_group) {
  using FF = FeatureFlag;
  GeneratorSpec spec;
  spec.n = 100000;
  spec.seed = 20190101;
  spec.class_names = {"no_arrest", "nonviolent_arrest", "violent_arrest"};
  if (include_other_group) {
    spec.group_proportions = {{"W", 0.32}, {"B", 0.67}, {"other", 0.01}};
  } else {
    spec.group_proportions = {{"W", 0.32 / 0.99}, {"B", 0.67 / 0.99}};
  }
  // The target B rates sum to 0.99 in total; the missing point is
  // spread evenly, which keeps every class inside its rounding interval.
  constexpr double kThird = 0.01 / 3.0;
  spec.base_rates = {{"W", {0.58, 0.35, 0.07}}, {"B", {0.56 + kThird, 0.32 + kThird, 0.11 + kThird}}};
  if (include_other_group) spec.base_rates["other"] = {0.57, 0.33, 0.10};

  FeatureDistribution age = NegBin(2, 13.0, 12.0, 12.5, 18.0);
  age.min = 16.0;
  age.max = 90.0;
  FeatureDistribution first = NegBin(2, 4.0, 3.5, 4.0, 18.0);
  first.min = 16.0;
  first.max = 90.0;
  first.cap_by = "age";

  spec.features = {
      Feature("age", FeatureKind::kYears, {FF::kBiographical}, age),
      Feature("age_first_adult_charge", FeatureKind::kYears, {FF::kBiographical}, first),
      Feature("male", FeatureKind::kBinary, {FF::kBiographical}, Bern(0.80, 0.84, 0.82)),
      Feature("Aproperty", FeatureKind::kCount, {FF::kSeriousPrior}, NegBin(1, 1.6, 2.4, 2.0)),
      Feature("Aviolent", FeatureKind::kCount, {FF::kSeriousPrior}, NegBin(1, 0.5, 1.0, 0.7)),
      Feature("Aweapons", FeatureKind::kCount, {FF::kSeriousPrior}, NegBin(1, 0.25, 0.55, 0.4)),
      Feature("Apetty", FeatureKind::kCount, {FF::kDiscretionaryPrior}, NegBin(1, 1.0, 1.8, 1.4)),
      Feature("Adisorder", FeatureKind::kCount, {FF::kDiscretionaryPrior}, NegBin(1, 0.5, 1.0, 0.7)),
      Feature("Jproperty", FeatureKind::kCount, {FF::kJuvenilePrior}, NegBin(1, 0.3, 0.6, 0.45)),
      Feature("Jviolent", FeatureKind::kCount, {FF::kJuvenilePrior}, NegBin(1, 0.1, 0.25, 0.18)),
      Feature("charge_count", FeatureKind::kCount, {FF::kInstantCharge}, NegBin(2, 0.8, 0.9, 0.85, 1.0)),
      Feature("charge_violent", FeatureKind::kBinary, {FF::kInstantCharge}, Bern(0.15, 0.20, 0.18)),
  };

  const Shape linear{Shape::Kind::kLinear, {}, {}};
  const Shape log1p{Shape::Kind::kLog1p, {}, {}};
  spec.outcome = {
      // Risk peaks in the late teens / early twenties and settles near 40.
      {"age", Piecewise({16, 18, 23, 40, 90}, {0.3, 0.6, 0.6, -0.5, -0.5}), {0, 0.9, 1.1}},
      // Early first adult charge raises risk, bottoming out in the early 20s.
      {"age_first_adult_charge", Piecewise({16, 22, 40, 90}, {0.7, 0.0, 0.2, 0.3}), {0, 0.8, 0.9}},
      {"male", linear, {0, 0.3, 0.6}},
      // Saturating increase in serious priors.
      {"Aproperty", log1p, {0, 0.55, 0.3}},
      {"Aviolent", log1p, {0, 0.15, 0.75}},
      {"Aweapons", log1p, {0, 0.1, 0.6}},
      {"Apetty", log1p, {0, 0.2, 0.05}},
      {"Jviolent", log1p, {0, 0.05, 0.25}},
      {"charge_count", linear, {0, 0.1, 0.05}},
      {"charge_violent", linear, {0, 0.0, 0.5}},
  };
  return spec;
}

double LabelUniform(std::uint64_t seed, std::uint64_t row) {
  Rng rng(MixSeed(MixSeed(seed, kLabelStream), row));
  return rng.Uniform();
}

std::vector<double> OutcomeScores(const GeneratorSpec& spec, std::span<const double> x,
                                  std::span<const double> intercepts) {
  const Schema schema = spec.schema();
  std::vector<double> s(intercepts.begin(), intercepts.end());
  s[0] = 0.0;
  for (const auto& t : spec.outcome) {
    const double v = t.shape.Eval(x[schema.Require(t.feature)]);
    for (std::size_t k = 1; k < s.size(); ++k) s[k] += t.coefficients[k] * v;
  }
  return s;
}

int DrawLabel(std::span<const double> probabilities, double u) {
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < probabilities.size(); ++k) {
    cum += probabilities[k];
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(probabilities.size()) - 1;
}

GenerationResult GenerateDetailed(const GeneratorSpec& spec) {
  spec.Validate();
  const Schema schema = spec.schema();
  const std::size_t nf = schema.size();
  const std::size_t n = static_cast<std::size_t>(spec.n);
  const std::size_t k_count = spec.class_names.size();

  std::vector<std::string> group_ids;
  std::vector<double> group_cum;
  double acc = 0.0;
  for (const auto& [g, p] : spec.group_proportions) {
    group_ids.push_back(g);
    acc += p;
    group_cum.push_back(acc);
  }

  std::vector<double> feats(n * nf);
  std::vector<std::string> groups(n);
  std::vector<std::size_t> group_of(n);
  std::vector<std::size_t> cap_index(nf, nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (spec.features[f].dist.cap_by) cap_index[f] = schema.Require(*spec.features[f].dist.cap_by);
  }

  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(MixSeed(spec.seed, i));
    const double ug = rng.Uniform();
    std::size_t g = 0;
    while (g + 1 < group_ids.size() && ug >= group_cum[g]) ++g;
    group_of[i] = g;
    groups[i] = group_ids[g];
    for (std::size_t f = 0; f < nf; ++f) {
      const FeatureDistribution& d = spec.features[f].dist;
      const std::vector<double>& p = d.ParamsFor(groups[i]);
      double v = 0.0;
      switch (d.family) {
        case FeatureDistribution::Family::kNegBinomial: {
          const double r = p[0];
          const double mean = p[1];
          if (mean > 0.0) {
            const double success = r / (r + mean);
            for (int j = 0; j < static_cast<int>(r); ++j) v += static_cast<double>(rng.Geometric(success));
          }
          break;
        }
        case FeatureDistribution::Family::kBernoulli:
          v = rng.Bernoulli(p[0]) ? 1.0 : 0.0;
          break;
        case FeatureDistribution::Family::kUniformInt: {
          const auto lo = static_cast<long long>(std::ceil(p[0]));
          const auto hi = static_cast<long long>(std::floor(p[1]));
          v = static_cast<double>(lo + static_cast<long long>(rng.UniformInt(static_cast<std::uint64_t>(hi - lo + 1))));
          break;
        }
      }
      v = std::clamp(v + d.offset, d.min, d.max);
      if (cap_index[f] < nf) v = std::min(v, feats[i * nf + cap_index[f]]);
      feats[i * nf + f] = v;
    }
  }

  // Feature part of the class scores, exponentiated once; intercepts only
  // rescale these during calibration.
  std::vector<std::size_t> term_feature;
  for (const auto& t : spec.outcome) term_feature.push_back(schema.Require(t.feature));
  std::vector<double> expo(n * k_count, 1.0);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k < k_count; ++k) {
      double s = 0.0;
      for (std::size_t t = 0; t < spec.outcome.size(); ++t) {
        s += spec.outcome[t].coefficients[k] * spec.outcome[t].shape.Eval(feats[i * nf + term_feature[t]]);
      }
      expo[i * k_count + k] = std::exp(s);
    }
    u[i] = LabelUniform(spec.seed, i);
  }

  GenerationResult result;
  std::vector<int> labels(n, 0);
  std::vector<double> probs(k_count);
  int max_sweeps_used = 0;
  for (std::size_t g = 0; g < group_ids.size(); ++g) {
    const std::string& gid = group_ids[g];
    const std::vector<double>& target = spec.base_rates.at(gid);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (group_of[i] == g) rows.push_back(i);
    }
    std::vector<double> b(k_count, 0.0);
    for (std::size_t k = 1; k < k_count; ++k) b[k] = std::log(target[k] / target[0]);

    auto assign = [&](const std::vector<double>& intercepts) {
      std::vector<double> eb(k_count);
      for (std::size_t k = 0; k < k_count; ++k) eb[k] = std::exp(intercepts[k]);
      std::vector<double> counts(k_count, 0.0);
      for (std::size_t i : rows) {
        double z = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
          probs[k] = expo[i * k_count + k] * eb[k];
          z += probs[k];
        }
        for (double& p : probs) p /= z;
        labels[i] = DrawLabel(probs, u[i]);
        counts[static_cast<std::size_t>(labels[i])] += 1.0;
      }
      return counts;
    };
    auto shares_ok = [&](const std::vector<double>& counts, double tol) {
      for (std::size_t k = 0; k < k_count; ++k) {
        if (std::abs(counts[k] / static_cast<double>(rows.size()) - target[k]) > tol) return false;
      }
      return true;
    };

    std::vector<double> counts(k_count, 0.0);
    if (!rows.empty()) {
      const double tol = std::max(spec.calibration_tolerance, 2.0 / static_cast<double>(rows.size()));
      counts = assign(b);
      int sweep = 0;
      while (!shares_ok(counts, tol)) {
        if (++sweep > spec.max_calibration_sweeps) {
          std::map<std::string, std::vector<double>> achieved;
          for (double& c : counts) c /= static_cast<double>(rows.size());
          achieved[gid] = counts;
          throw Error(ErrorCode::kCalibration,
                      "base rates not reached; achieved " + RatesToString(achieved));
        }
        // Class >= k has share sum_{j>=k} target_j; that share rises with b[k].
        for (std::size_t k = k_count - 1; k >= 1; --k) {
          double tail_target = 0.0;
          for (std::size_t j = k; j < k_count; ++j) tail_target += target[j];
          // Stop as soon as the tail is close enough. Bisecting to full
          // precision would park b[k] on the point where some row's label
          // flips, and then roundoff decides that row.
          double lo = b[k] - 20.0, hi = b[k] + 20.0;
          bool close = false;
          for (int it = 0; it < 60 && !close; ++it) {
            b[k] = 0.5 * (lo + hi);
            const auto c = assign(b);
            double tail = 0.0;
            for (std::size_t j = k; j < k_count; ++j) tail += c[j];
            const double share = tail / static_cast<double>(rows.size());
            close = std::abs(share - tail_target) <= 0.5 * tol;
            if (share < tail_target) {
              lo = b[k];
            } else {
              hi = b[k];
            }
          }
          if (!close) b[k] = hi;
        }
        counts = assign(b);
        max_sweeps_used = std::max(max_sweeps_used, sweep);
      }
    }
    result.intercepts[gid] = b;
    std::vector<double> rates(k_count, 0.0);
    if (!rows.empty()) {
      for (std::size_t k = 0; k < k_count; ++k) rates[k] = counts[k] / static_cast<double>(rows.size());
    }
    result.achieved_rates[gid] = rates;
  }
  result.calibration_sweeps = max_sweeps_used;

  std::vector<double> weights(n, 1.0);
  result.data = Dataset(schema, static_cast<int>(k_count), std::move(feats), std::move(labels),
                        std::move(groups), std::move(weights), {}, spec.class_names);
  return result;
}

Dataset Generate(const GeneratorSpec& spec) { return GenerateDetailed(spec).data; }

}  // namespace fairboost
