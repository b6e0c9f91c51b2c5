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

#include "fairboost/adjustments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairboost/audit.h"
#include "fairboost/error.h"

namespace fairboost {

WeightPlan WeightPlan::Manual(std::vector<double> weights) {
  WeightPlan p;
  p.class_weights = std::move(weights);
  p.provenance = Provenance::kManual;
  return p;
}

void WeightPlan::Validate(int n_classes) const {
  if (static_cast<int>(class_weights.size()) != n_classes) {
    throw Error(ErrorCode::kConfig, "weight plan has " + std::to_string(class_weights.size()) +
                                        " entries for " + std::to_string(n_classes) + " classes");
  }
  for (double w : class_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kConfig, "class weights must be finite and positive");
    }
  }
}

Dataset ApplyWeightPlan(const Dataset& data, const WeightPlan& plan) {
  plan.Validate(data.n_classes());
  std::vector<double> w(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    w[i] = data.weight(i) * plan.class_weights[static_cast<std::size_t>(data.label(i))];
  }
  return data.WithWeights(std::move(w));
}

std::vector<std::vector<double>> UniformCostTarget(int n_classes) {
  const auto k = static_cast<std::size_t>(n_classes);
  return std::vector<std::vector<double>>(k, std::vector<double>(k, 1.0));
}

std::vector<std::vector<double>> EmpiricalCostRatios(const std::vector<std::vector<double>>& counts) {
  const std::size_t k = counts.size();
  std::vector<std::vector<double>> r(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double num = counts[i][j];
      const double den = counts[j][i];
      if (den > 0.0) {
        r[i][j] = num / den;
      } else {
        r[i][j] = num > 0.0 ? std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return r;
}

bool CostRatiosWithin(const std::vector<std::vector<double>>& ratios,
                      const std::vector<std::vector<double>>& target, double tolerance) {
  const std::size_t k = ratios.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = ratios[i][j];
      if (std::isnan(r)) continue;
      const double t = target[i][j];
      if (!(r >= t * (1.0 - tolerance) && r <= t / (1.0 - tolerance))) return false;
    }
  }
  return true;
}

namespace {

void ValidateTarget(const std::vector<std::vector<double>>& target, int n_classes) {
  const auto k = static_cast<std::size_t>(n_classes);
  if (target.size() != k) throw Error(ErrorCode::kConfig, "cost target must be K x K");
  for (std::size_t i = 0; i < k; ++i) {
    if (target[i].size() != k) throw Error(ErrorCode::kConfig, "cost target must be K x K");
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j && !(target[i][j] > 0.0)) {
        throw Error(ErrorCode::kConfig, "cost ratio targets must be positive");
      }
    }
  }
}

// Largest |log(r / t)| over pairs i < j; +inf if a pair is infinite.
double WorstLogDeviation(const std::vector<std::vector<double>>& ratios,
                         const std::vector<std::vector<double>>& target) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    for (std::size_t j = i + 1; j < ratios.size(); ++j) {
      const double r = ratios[i][j];
      if (std::isnan(r)) continue;
      if (!(r > 0.0) || std::isinf(r)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(std::log(r / target[i][j])));
    }
  }
  return worst;
}

void NormalizeMeanOne(std::vector<double>& w) {
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (double& v : w) v /= mean;
}

}  // namespace

WeightPlan CalibrateCostRatios(const Dataset& data, const GbmConfig& config,
                               const std::vector<std::vector<double>>& target, int max_iter,
                               double tolerance) {
  if (max_iter < 1) throw Error(ErrorCode::kConfig, "max_iter must be at least 1");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw Error(ErrorCode::kConfig, "tolerance must be in (0,1)");
  const int k_count = data.n_classes();
  ValidateTarget(target, k_count);
  const auto k = static_cast<std::size_t>(k_count);

  std::vector<double> totals = data.ClassWeightTotals();
  std::vector<double> w(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (!(totals[c] > 0.0)) {
      throw Error(ErrorCode::kDegenerateClass, "class " + std::to_string(c) + " has zero total weight");
    }
    w[c] = 1.0 / totals[c];
  }
  NormalizeMeanOne(w);

  WeightPlan best;
  double best_dev = std::numeric_limits<double>::infinity();
  std::vector<double> scale(k, 1.0), previous(k, 0.0);
  int fits = 0;
  bool converged = false;
  for (int it = 1; it <= max_iter && !converged; ++it) {
    const WeightPlan plan = WeightPlan::Manual(w);
    const Dataset weighted = ApplyWeightPlan(data, plan);
    const BoostModel model = Train(weighted, config);
    ++fits;
    const std::vector<int> preds = model.PredictClasses(weighted);
    const ConfusionReport table = Confusion(data.labels(), preds, data.weights(), k_count);
    const auto ratios = EmpiricalCostRatios(table.counts);
    const double dev = WorstLogDeviation(ratios, target);
    converged = CostRatiosWithin(ratios, target, tolerance);
    if (converged || dev < best_dev || it == 1) {
      best_dev = dev;
      best = plan;
      best.provenance = WeightPlan::Provenance::kCalibrated;
      best.calibration = CostRatioCalibration{target, ratios, 0, converged, tolerance};
    }

    std::vector<double> step(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        const double r = (table.counts[i][j] + 0.5) / (table.counts[j][i] + 0.5);
        step[i] += std::log(r / target[i][j]);
      }
      step[i] /= 2.0 * static_cast<double>(k - 1);
      // The ratios respond steeply to the weights, so a class whose step
      // changes sign has its step size halved.
      if (step[i] * previous[i] < 0.0) {
        scale[i] *= 0.5;
      } else {
        scale[i] = std::min(1.0, scale[i] * 1.2);
      }
      previous[i] = step[i];
      w[i] *= std::exp(std::clamp(scale[i] * step[i], -1.0, 1.0));
    }
    NormalizeMeanOne(w);
  }
  best.calibration->iterations = fits;
  return best;
}

Dataset DownweightClass(const Dataset& data, int cls, double factor) {
  if (cls < 0 || cls >= data.n_classes()) throw Error(ErrorCode::kLabel, "class out of range");
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw Error(ErrorCode::kDomain, "down-weight factor must be in (0,1]");
  }
  std::vector<double> plan(static_cast<std::size_t>(data.n_classes()), 1.0);
  plan[static_cast<std::size_t>(cls)] = factor;
  return ApplyWeightPlan(data, WeightPlan::Manual(std::move(plan)));
}

std::vector<std::size_t> ResolveFeatures(const Schema& schema, const FeatureSelector& selector) {
  std::vector<bool> hit(schema.size(), false);
  for (const auto& name : selector.names) hit[schema.Require(name)] = true;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema.feature(f).flags.intersects(selector.flags)) hit[f] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (hit[f]) out.push_back(f);
  }
  if (out.empty()) throw Error(ErrorCode::kSchema, "transform selector matches no feature");
  return out;
}

Dataset ApplyTransform(const Dataset& test, const TransformSpec& spec) {
  std::vector<double> x(test.features().begin(), test.features().end());
  const std::size_t nf = test.n_features();
  for (const TransformStep& step : spec.steps) {
    if (step.op.kind == TransformOp::Kind::kScale && !(step.op.factor > 0.0)) {
      throw Error(ErrorCode::kConfig, "scale factor must be positive");
    }
    const std::vector<std::size_t> feats = ResolveFeatures(test.schema(), step.features);
    for (std::size_t i = 0; i < test.n_rows(); ++i) {
      if (step.group && test.group(i) != *step.group) continue;
      for (std::size_t f : feats) {
        double& v = x[i * nf + f];
        switch (step.op.kind) {
          case TransformOp::Kind::kSqrt:
            if (v < 0.0) {
              throw Error(ErrorCode::kDomain, "sqrt of negative value at row " + std::to_string(i) +
                                                  ", feature '" + test.schema().feature(f).name + "'");
            }
            v = std::sqrt(v);
            break;
          case TransformOp::Kind::kScale:
            v *= step.op.factor;
            break;
          case TransformOp::Kind::kRecode:
            if (v == step.op.from) v = step.op.to;
            break;
        }
      }
    }
  }
  return test.WithFeatures(std::move(x));
}

}  // namespace fairboost
