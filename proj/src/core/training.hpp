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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/dataio.hpp"
#include "core/models.hpp"
#include "core/rng.hpp"

namespace robustlab {

struct LrDecay {
  int epoch;      // multiply the learning rate by `factor` from this epoch on (0-based)
  double factor;
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 128;
  double learning_rate = 0.1;
  double weight_decay = 5e-4;
  std::vector<LrDecay> lr_decay_schedule;
  double momentum = 0.0;
  // 0 disables Gaussian augmentation.
  double augment_sigma_max = 0.0;
  bool clip_augmented = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ModelSpec {
  enum class Kind { kLinear, kMlp };
  Kind kind = Kind::kLinear;
  std::vector<int> hidden;  // ReLU widths for kMlp
};

struct EpochStats {
  int epoch;
  double loss;
  double train_acc;
};

struct TrainingReport {
  std::vector<EpochStats> epochs;
  std::optional<double> clean_test_acc;
  std::optional<double> noisy_test_acc;

  std::string to_json() const;
};

struct TrainResult {
  std::shared_ptr<const Classifier> model;
  TrainingReport report;
};

struct AugmentedBatch {
  std::vector<Vector> inputs;
  std::vector<int> labels;
  std::vector<double> sigmas;  // per-example noise scale drawn from U(0, sigma_max)
};

// Each example gets its own σᵢ ~ U(0, sigma_max) and additive N(0, σᵢ²I)
// noise. Labels are untouched; values are clipped to [0,1] only on request.
AugmentedBatch gaussian_augment_batch(std::span<const Vector> inputs, std::span<const int> labels,
                                      double sigma_max, RngStream& rng, bool clip = false);

// Initial parameters for a spec: He-normal hidden layers, 1/fan_in final
// layer, zero biases; keyed by (seed, "init").
std::shared_ptr<const Classifier> initial_model(const ModelSpec& spec, int input_dim,
                                                int num_classes, std::uint64_t seed);

// Minibatch SGD on cross entropy with L2 weight decay (weights only) and a
// multiplicative step schedule. Deterministic in (dataset, spec, config).
// Throws NumericalError when the loss stops being finite.
TrainResult train(const Dataset& data, const ModelSpec& spec, const TrainConfig& config);

// Accuracy on clean inputs (noise_sigma == 0) or averaged over n_noise_draws
// noisy copies per point. Noise for point i, draw r comes from the stream
// keyed (seed, "eval-noise", i, r).
double evaluate(const Classifier& model, const Dataset& data, double noise_sigma, int n_noise_draws,
                std::uint64_t seed, bool clip = false);

}  // namespace robustlab
