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

#include "fairboost/gbm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairboost/error.h"
#include "fairboost/rng.h"

namespace fairboost {

void GbmConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (n_rounds < 0) fail("n_rounds must be nonnegative");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail("learning_rate must be in (0,1]");
  if (max_depth < 1) fail("max_depth must be positive");
  if (!(min_child_weight >= 0.0)) fail("min_child_weight must be nonnegative");
  if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must be in (0,1]");
  if (n_classes < 2) fail("n_classes must be at least 2");
  if (!(lambda >= 0.0)) fail("lambda must be nonnegative");
}

ClassProbabilities Softmax(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::kNumeric, "softmax of an empty score vector");
  double m = -std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::kNumeric, "non-finite score");
    m = std::max(m, s);
  }
  ClassProbabilities p(scores.size());
  double z = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    p[k] = std::exp(scores[k] - m);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

int ArgMax(std::span<const double> values) {
  int best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

GradHess DevianceGradHess(int label, std::span<const double> probabilities, double weight) {
  const std::size_t k_count = probabilities.size();
  if (label < 0 || static_cast<std::size_t>(label) >= k_count) {
    throw Error(ErrorCode::kLabel, "label out of range");
  }
  if (!(weight >= 0.0)) throw Error(ErrorCode::kNumeric, "weight must be nonnegative");
  GradHess out{std::vector<double>(k_count), std::vector<double>(k_count)};
  for (std::size_t k = 0; k < k_count; ++k) {
    const double p = probabilities[k];
    const double y = static_cast<int>(k) == label ? 1.0 : 0.0;
    out.grad[k] = weight * (p - y);
    out.hess[k] = weight * p * (1.0 - p);
  }
  return out;
}

double Deviance(int label, std::span<const double> scores, double weight) {
  double m = -std::numeric_limits<double>::infinity();
  for (double s : scores) m = std::max(m, s);
  double z = 0.0;
  for (double s : scores) z += std::exp(s - m);
  return weight * (m + std::log(z) - scores[static_cast<std::size_t>(label)]);
}

void BoostModel::CheckSchema(const Schema& other) const {
  if (!(other == schema)) {
    throw Error(ErrorCode::kSchema, "dataset schema " + other.Fingerprint() +
                                        " does not match model schema " + schema.Fingerprint());
  }
}

std::vector<double> BoostModel::PredictScores(std::span<const double> x) const {
  if (x.size() != schema.size()) {
    throw Error(ErrorCode::kSchema, "feature vector has length " + std::to_string(x.size()) +
                                        ", model expects " + std::to_string(schema.size()));
  }
  std::vector<double> s = base_scores;
  for (const auto& round : rounds) {
    for (std::size_t k = 0; k < round.size(); ++k) {
      s[k] += config.learning_rate * round[k].Predict(x);
    }
  }
  return s;
}

ClassProbabilities BoostModel::PredictProba(std::span<const double> x) const {
  return Softmax(PredictScores(x));
}

int BoostModel::PredictClass(std::span<const double> x) const {
  return ArgMax(PredictProba(x));
}

std::vector<int> BoostModel::PredictClasses(const Dataset& data) const {
  CheckSchema(data.schema());
  std::vector<int> out(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) out[i] = PredictClass(data.row(i));
  return out;
}

std::vector<ClassProbabilities> BoostModel::PredictProbaAll(const Dataset& data) const {
  CheckSchema(data.schema());
  std::vector<ClassProbabilities> out(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) out[i] = PredictProba(data.row(i));
  return out;
}

BoostModel Train(const Dataset& data, const GbmConfig& config, TrainingLog* log) {
  config.Validate();
  if (data.empty()) throw Error(ErrorCode::kFit, "cannot train on an empty dataset");
  if (data.n_classes() != config.n_classes) {
    throw Error(ErrorCode::kConfig, "config has " + std::to_string(config.n_classes) +
                                        " classes but data has " + std::to_string(data.n_classes()));
  }
  const std::size_t n = data.n_rows();
  const std::size_t k_count = static_cast<std::size_t>(config.n_classes);

  double min_positive = std::numeric_limits<double>::infinity();
  for (double w : data.weights()) {
    if (w > 0.0) min_positive = std::min(min_positive, w);
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = data.weight(i) / min_positive;

  std::vector<double> class_totals(k_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) class_totals[static_cast<std::size_t>(data.label(i))] += weights[i];
  const double total = std::accumulate(class_totals.begin(), class_totals.end(), 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (!(class_totals[k] > 0.0)) {
      throw Error(ErrorCode::kDegenerateClass,
                  "class " + data.class_names()[k] + " has zero total weight");
    }
  }

  BoostModel model;
  model.config = config;
  model.schema = data.schema();
  model.class_names = data.class_names();
  model.training_rows_fingerprint = data.RowIdFingerprint();
  model.base_scores.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) model.base_scores[k] = std::log(class_totals[k] / total);

  const FeatureMatrix x{data.features(), n, data.n_features()};
  const TreeBuilder builder(x);
  const TreeParams params = config.tree_params();

  std::vector<double> scores(n * k_count);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(model.base_scores.begin(), model.base_scores.end(), scores.begin() + static_cast<std::ptrdiff_t>(i * k_count));
  }

  auto deviance = [&]() {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d += Deviance(data.label(i), std::span<const double>(scores).subspan(i * k_count, k_count),
                    weights[i]);
    }
    return d;
  };
  if (log) log->deviance.assign(1, deviance());

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  const std::size_t sample_size =
      config.subsample >= 1.0
          ? n
          : std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(config.subsample * static_cast<double>(n))),
                                    1, n);

  std::vector<std::vector<double>> grad(k_count, std::vector<double>(n));
  std::vector<std::vector<double>> hess(k_count, std::vector<double>(n));
  std::vector<std::size_t> sample;
  model.rounds.reserve(static_cast<std::size_t>(config.n_rounds));

  for (int t = 0; t < config.n_rounds; ++t) {
    if (sample_size == n) {
      sample = all_rows;
    } else {
      // Partial Fisher-Yates on a fresh index array, one stream per round.
      Rng rng(MixSeed(config.seed, static_cast<std::uint64_t>(t)));
      std::vector<std::size_t> perm = all_rows;
      for (std::size_t i = 0; i < sample_size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(n - i));
        std::swap(perm[i], perm[j]);
      }
      sample.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sample_size));
      std::sort(sample.begin(), sample.end());
    }

    for (std::size_t i : sample) {
      const ClassProbabilities p =
          Softmax(std::span<const double>(scores).subspan(i * k_count, k_count));
      const int y = data.label(i);
      for (std::size_t k = 0; k < k_count; ++k) {
        const double target = static_cast<int>(k) == y ? 1.0 : 0.0;
        grad[k][i] = weights[i] * (p[k] - target);
        hess[k][i] = weights[i] * p[k] * (1.0 - p[k]);
      }
    }

    std::vector<Tree> trees;
    trees.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      trees.push_back(builder.Fit(sample, grad[k], hess[k], params));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      for (std::size_t k = 0; k < k_count; ++k) {
        scores[i * k_count + k] += config.learning_rate * trees[k].Predict(row);
      }
    }
    model.rounds.push_back(std::move(trees));
    if (log) log->deviance.push_back(deviance());
  }
  return model;
}

}  // namespace fairboost
