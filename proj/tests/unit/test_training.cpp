// Copyright 2026 The robustlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "core/dataio.hpp"
#include "core/errors.hpp"
#include "core/gaussian_math.hpp"
#include "core/model_io.hpp"
#include "core/training.hpp"

namespace robustlab {
namespace {

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

TEST(Augmentation, SigmaUniformAndNoiseGaussian) {
  const int n = 4000, dim = 8;
  std::vector<Vector> xs(n, Vector::Constant(dim, 0.5));
  std::vector<int> ys(n, 0);
  RngStream rng(1, "aug-test");
  const AugmentedBatch b = gaussian_augment_batch(xs, ys, 0.4, rng, false);
  ASSERT_EQ(b.inputs.size(), xs.size());
  EXPECT_EQ(b.labels, ys);
  // Per-example sigma ~ U(0, 0.4).
  EXPECT_LT(ks_statistic(b.sigmas, [](double s) { return std::clamp(s / 0.4, 0.0, 1.0); }),
            1.63 / std::sqrt(double(n)));
  // Standardized noise is N(0, 1).
  std::vector<double> z;
  for (int i = 0; i < n; ++i) {
    if (b.sigmas[i] < 1e-3) continue;
    for (int k = 0; k < dim; ++k) z.push_back((b.inputs[i][k] - 0.5) / b.sigmas[i]);
  }
  EXPECT_LT(ks_statistic(z, gaussian::std_normal_cdf), 1.63 / std::sqrt(double(z.size())));
}

TEST(Augmentation, ClipFlagKeepsRange) {
  std::vector<Vector> xs(200, Vector::Constant(4, 0.9));
  std::vector<int> ys(200, 1);
  RngStream a(2, "clip"), b(2, "clip");
  const auto clipped = gaussian_augment_batch(xs, ys, 1.0, a, true);
  const auto raw = gaussian_augment_batch(xs, ys, 1.0, b, false);
  bool any_outside = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_GE(clipped.inputs[i].minCoeff(), 0.0);
    EXPECT_LE(clipped.inputs[i].maxCoeff(), 1.0);
    any_outside |= raw.inputs[i].maxCoeff() > 1.0;
  }
  EXPECT_TRUE(any_outside);
}

TEST(Train, DeterministicForSeed) {
  const Dataset d = synth_blobs(3, 30, 5, 1.0, 0.3, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.augment_sigma_max = 0.2;
  cfg.seed = 9;
  const ModelSpec spec{ModelSpec::Kind::kMlp, {8}};
  const auto a = train(d, spec, cfg);
  const auto b = train(d, spec, cfg);
  EXPECT_EQ(serialize_model(*a.model), serialize_model(*b.model));
  cfg.seed = 10;
  EXPECT_NE(serialize_model(*train(d, spec, cfg).model), serialize_model(*a.model));
}

TEST(Train, LossDecreasesAndReportSerializes) {
  const Dataset d = synth_blobs(2, 100, 6, 1.0, 0.4, 2);
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 20;
  cfg.momentum = 0.9;
  cfg.learning_rate = 0.05;
  cfg.lr_decay_schedule = {{5, 0.1}};
  const auto r = train(d, ModelSpec{ModelSpec::Kind::kMlp, {16}}, cfg);
  ASSERT_EQ(r.report.epochs.size(), 8u);
  EXPECT_LT(r.report.epochs.back().loss, r.report.epochs.front().loss);
  const auto j = nlohmann::json::parse(r.report.to_json());
  EXPECT_EQ(j["epochs"].size(), 8u);
  EXPECT_TRUE(j.contains("final"));
}

TEST(Train, DivergenceIsReported) {
  const Dataset d = synth_blobs(2, 50, 4, 50.0, 1.0, 3);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.learning_rate = 1e300;
  cfg.weight_decay = 0.0;
  EXPECT_THROW(train(d, ModelSpec{ModelSpec::Kind::kMlp, {16}}, cfg), NumericalError);
}

TEST(Train, RejectsInvalidConfig) {
  const Dataset d = synth_blobs(2, 5, 2, 1.0, 0.1, 3);
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train(d, ModelSpec{}, cfg), ContractError);
  cfg = TrainConfig{};
  cfg.augment_sigma_max = -1.0;
  EXPECT_THROW(train(d, ModelSpec{}, cfg), ContractError);
  EXPECT_THROW(train(Dataset{}, ModelSpec{}, TrainConfig{}), ContractError);
}

TEST(Evaluate, NoiseFreeMatchesPredictions) {
  const Dataset d = synth_blobs(2, 40, 3, 1.0, 0.6, 4);
  const auto r = train(d, ModelSpec{}, TrainConfig{});
  int ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += r.model->predict(d.inputs[i]) == d.labels[i];
  EXPECT_DOUBLE_EQ(evaluate(*r.model, d, 0.0, 1, 0), ok / double(d.size()));
  EXPECT_EQ(evaluate(*r.model, d, 0.2, 4, 5), evaluate(*r.model, d, 0.2, 4, 5));
}

}  // namespace
}  // namespace robustlab
