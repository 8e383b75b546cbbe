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

#include "core/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace robustlab {

void TrainConfig::validate() const {
  if (epochs < 0) throw ContractError("epochs must be >= 0");
  if (batch_size < 1) throw ContractError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ContractError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ContractError("weight_decay must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ContractError("momentum must be in [0, 1)");
  if (!(augment_sigma_max >= 0.0)) throw ContractError("augment_sigma_max must be >= 0");
  for (const LrDecay& d : lr_decay_schedule) {
    if (d.epoch < 0 || !(d.factor > 0.0)) throw ContractError("invalid lr decay entry");
  }
}

std::string TrainingReport::to_json() const {
  nlohmann::ordered_json j;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const EpochStats& e : epochs) {
    j["epochs"].push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"train_acc", e.train_acc}});
  }
  nlohmann::ordered_json final_stats = nlohmann::ordered_json::object();
  if (clean_test_acc) final_stats["clean_test_acc"] = *clean_test_acc;
  if (noisy_test_acc) final_stats["noisy_test_acc"] = *noisy_test_acc;
  j["final"] = final_stats;
  return j.dump(2);
}

AugmentedBatch gaussian_augment_batch(std::span<const Vector> inputs, std::span<const int> labels,
                                      double sigma_max, RngStream& rng, bool clip) {
  if (!(sigma_max >= 0.0)) throw ContractError("sigma_max must be >= 0");
  if (inputs.size() != labels.size()) throw ContractError("batch inputs and labels differ in length");
  AugmentedBatch out;
  out.inputs.assign(inputs.begin(), inputs.end());
  out.labels.assign(labels.begin(), labels.end());
  out.sigmas.assign(inputs.size(), 0.0);
  if (sigma_max == 0.0) return out;
  for (std::size_t i = 0; i < out.inputs.size(); ++i) {
    const double s = rng.uniform(0.0, sigma_max);
    out.sigmas[i] = s;
    Vector& x = out.inputs[i];
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += s * rng.normal();
    if (clip) x = x.cwiseMax(0.0).cwiseMin(1.0);
  }
  return out;
}

namespace {

std::vector<DenseLayer> init_layers(const ModelSpec& spec, int input_dim, int num_classes,
                                    std::uint64_t seed) {
  std::vector<int> widths{input_dim};
  if (spec.kind == ModelSpec::Kind::kMlp) {
    for (int h : spec.hidden) {
      if (h < 1) throw ContractError("hidden widths must be positive");
      widths.push_back(h);
    }
  }
  widths.push_back(num_classes);
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const bool last = k + 2 == widths.size();
    const int in = widths[k];
    const int out = widths[k + 1];
    const double scale = std::sqrt((last ? 1.0 : 2.0) / in);
    RngStream rng(seed, "init", {k});
    DenseLayer l;
    l.weights.resize(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) l.weights(r, c) = scale * rng.normal();
    l.bias = Vector::Zero(out);
    l.activation = last ? Activation::kIdentity : Activation::kRelu;
    layers.push_back(std::move(l));
  }
  return layers;
}

std::shared_ptr<const Classifier> wrap(const ModelSpec& spec, std::vector<DenseLayer> layers) {
  if (spec.kind == ModelSpec::Kind::kLinear) {
    return std::make_shared<LinearModel>(std::move(layers.front().weights),
                                         std::move(layers.front().bias));
  }
  return std::make_shared<MlpModel>(std::move(layers));
}

}  // namespace

std::shared_ptr<const Classifier> initial_model(const ModelSpec& spec, int input_dim,
                                                int num_classes, std::uint64_t seed) {
  return wrap(spec, init_layers(spec, input_dim, num_classes, seed));
}

TrainResult train(const Dataset& data, const ModelSpec& spec, const TrainConfig& config) {
  config.validate();
  data.validate();
  if (data.empty()) throw ContractError("cannot train on an empty dataset");

  DenseStack stack(init_layers(spec, data.dim(), data.num_classes, config.seed));
  auto& layers = stack.mutable_layers();
  std::vector<LayerGradient> grads(layers.size());
  std::vector<LayerGradient> velocity(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    velocity[k].weights = Matrix::Zero(layers[k].weights.rows(), layers[k].weights.cols());
    velocity[k].bias = Vector::Zero(layers[k].bias.size());
  }

  TrainingReport report;
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  double lr = config.learning_rate;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const LrDecay& d : config.lr_decay_schedule) {
      if (d.epoch == epoch) lr *= d.factor;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream shuffle_rng(config.seed, "shuffle", {static_cast<std::uint64_t>(epoch)});
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng() % i]);
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      std::vector<Vector> xs;
      std::vector<int> ys;
      for (std::size_t i = start; i < stop; ++i) {
        xs.push_back(data.inputs[order[i]]);
        ys.push_back(data.labels[order[i]]);
      }
      RngStream aug_rng(config.seed, "augment",
                        {static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(batch_index)});
      AugmentedBatch batch =
          gaussian_augment_batch(xs, ys, config.augment_sigma_max, aug_rng, config.clip_augmented);

      for (std::size_t k = 0; k < layers.size(); ++k) {
        grads[k].weights = Matrix::Zero(layers[k].weights.rows(), layers[k].weights.cols());
        grads[k].bias = Vector::Zero(layers[k].bias.size());
      }
      for (std::size_t b = 0; b < batch.inputs.size(); ++b) {
        const Vector z = stack.forward(batch.inputs[b]);
        const double loss = cross_entropy(z, batch.labels[b]);
        if (!std::isfinite(loss)) {
          throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_index) +
                               "; lower the learning rate");
        }
        loss_sum += loss;
        if (argmax_lowest(z) == batch.labels[b]) ++correct;
        stack.backward(batch.inputs[b], loss_logit_gradient(z, batch.labels[b], Loss::kCrossEntropy),
                       &grads);
      }
      const double inv = 1.0 / static_cast<double>(batch.inputs.size());
      for (std::size_t k = 0; k < layers.size(); ++k) {
        Matrix gw = grads[k].weights * inv + config.weight_decay * layers[k].weights;
        Vector gb = grads[k].bias * inv;
        velocity[k].weights = config.momentum * velocity[k].weights + gw;
        velocity[k].bias = config.momentum * velocity[k].bias + gb;
        layers[k].weights -= lr * velocity[k].weights;
        layers[k].bias -= lr * velocity[k].bias;
      }
    }
    report.epochs.push_back({epoch, loss_sum / static_cast<double>(n),
                             static_cast<double>(correct) / static_cast<double>(n)});
  }
  return {wrap(spec, std::move(layers)), std::move(report)};
}

double evaluate(const Classifier& model, const Dataset& data, double noise_sigma, int n_noise_draws,
                std::uint64_t seed, bool clip) {
  if (data.empty()) throw ContractError("cannot evaluate on an empty dataset");
  if (!(noise_sigma >= 0.0)) throw ContractError("noise_sigma must be >= 0");
  if (noise_sigma > 0.0 && n_noise_draws < 1) {
    throw ContractError("n_noise_draws must be >= 1 when noise_sigma > 0");
  }
  const std::size_t n = data.size();
  std::vector<double> per_point(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const Vector& x = data.inputs[i];
    if (noise_sigma == 0.0) {
      per_point[i] = model.predict(x) == data.labels[i] ? 1.0 : 0.0;
      return;
    }
    int hits = 0;
    for (int r = 0; r < n_noise_draws; ++r) {
      RngStream rng(seed, "eval-noise", {i, static_cast<std::uint64_t>(r)});
      Vector xn = x;
      for (Eigen::Index k = 0; k < xn.size(); ++k) xn[k] += noise_sigma * rng.normal();
      if (clip) xn = xn.cwiseMax(0.0).cwiseMin(1.0);
      if (model.predict(xn) == data.labels[i]) ++hits;
    }
    per_point[i] = static_cast<double>(hits) / n_noise_draws;
  });
  return std::accumulate(per_point.begin(), per_point.end(), 0.0) / static_cast<double>(n);
}

}  // namespace robustlab
