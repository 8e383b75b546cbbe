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

#include "core/models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"
#include "core/gaussian_math.hpp"

namespace robustlab {

int argmax_lowest(const Vector& z) {
  int best = 0;
  for (int j = 1; j < z.size(); ++j) {
    if (z[j] > z[best]) best = j;
  }
  return best;
}

double margin_of(const Vector& z, int label, int* runner_up) {
  int other = -1;
  for (int j = 0; j < z.size(); ++j) {
    if (j == label) continue;
    if (other < 0 || z[j] > z[other]) other = j;
  }
  if (runner_up) *runner_up = other;
  return z[label] - z[other];
}

Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

double cross_entropy(const Vector& z, int label) {
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return lse - z[label];
}

Vector loss_logit_gradient(const Vector& z, int label, Loss loss) {
  if (loss == Loss::kCrossEntropy) {
    Vector g = softmax(z);
    g[label] -= 1.0;
    return g;
  }
  int other = 0;
  margin_of(z, label, &other);
  Vector g = Vector::Zero(z.size());
  g[label] = 1.0;
  g[other] = -1.0;
  return g;
}

int Classifier::predict(const Vector& x) const { return argmax_lowest(logits(x)); }

void Classifier::check_input(const Vector& x) const {
  if (x.size() != input_dim()) {
    throw ContractError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                        std::to_string(input_dim()));
  }
}

void Classifier::check_label(int label) const {
  if (label < 0 || label >= num_classes()) {
    throw ContractError("label " + std::to_string(label) + " outside [0, " +
                        std::to_string(num_classes()) + ")");
  }
}

DenseStack::DenseStack(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ContractError("dense stack needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& l = layers_[i];
    if (l.weights.rows() == 0 || l.weights.cols() == 0) {
      throw ContractError("layer " + std::to_string(i) + " has an empty weight matrix");
    }
    if (l.bias.size() != l.weights.rows()) {
      throw ContractError("layer " + std::to_string(i) + " bias length does not match its rows");
    }
    if (i > 0 && l.weights.cols() != layers_[i - 1].weights.rows()) {
      throw ContractError("layer " + std::to_string(i) + " input width does not chain");
    }
    if (!l.weights.allFinite() || !l.bias.allFinite()) {
      throw ContractError("layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
}

Vector DenseStack::forward(const Vector& x) const {
  Vector h = x;
  for (const DenseLayer& l : layers_) {
    Vector z = l.weights * h + l.bias;
    if (l.activation == Activation::kRelu) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Vector DenseStack::backward(const Vector& x, const Vector& dlogits,
                            std::vector<LayerGradient>* grads) const {
  // Keep every layer input and pre-activation for the reverse pass.
  std::vector<Vector> inputs;
  std::vector<Vector> pre;
  inputs.reserve(layers_.size());
  pre.reserve(layers_.size());
  Vector h = x;
  for (const DenseLayer& l : layers_) {
    inputs.push_back(h);
    Vector z = l.weights * h + l.bias;
    pre.push_back(z);
    h = l.activation == Activation::kRelu ? Vector(z.cwiseMax(0.0)) : z;
  }
  Vector delta = dlogits;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const DenseLayer& l = layers_[k];
    if (l.activation == Activation::kRelu) {
      delta = (pre[k].array() > 0.0).select(delta, 0.0);
    }
    if (grads) {
      (*grads)[k].weights.noalias() += delta * inputs[k].transpose();
      (*grads)[k].bias += delta;
    }
    delta = l.weights.transpose() * delta;
  }
  return delta;
}

LinearModel::LinearModel(Matrix weights, Vector biases)
    : stack_({DenseLayer{std::move(weights), std::move(biases), Activation::kIdentity}}) {
  if (stack_.output_dim() < 2) throw ContractError("linear model needs at least 2 classes");
}

Vector LinearModel::logits(const Vector& x) const {
  check_input(x);
  return stack_.forward(x);
}

Vector LinearModel::input_gradient(const Vector& x, int label, Loss loss) const {
  check_input(x);
  check_label(label);
  const Vector z = stack_.forward(x);
  return weights().transpose() * loss_logit_gradient(z, label, loss);
}

MlpModel::MlpModel(std::vector<DenseLayer> layers) : stack_(std::move(layers)) {
  if (stack_.output_dim() < 2) throw ContractError("mlp needs at least 2 output classes");
  if (stack_.layers().back().activation != Activation::kIdentity) {
    throw ContractError("mlp final layer must use the identity activation");
  }
}

Vector MlpModel::logits(const Vector& x) const {
  check_input(x);
  return stack_.forward(x);
}

Vector MlpModel::input_gradient(const Vector& x, int label, Loss loss) const {
  check_input(x);
  check_label(label);
  const Vector z = stack_.forward(x);
  return stack_.backward(x, loss_logit_gradient(z, label, loss), nullptr);
}

BitdepthDefense::BitdepthDefense(std::shared_ptr<const Classifier> base, int bits,
                                 bool masked_gradient)
    : base_(std::move(base)), bits_(bits), masked_gradient_(masked_gradient) {
  if (!base_) throw ContractError("bitdepth defense needs a base model");
  if (bits < 1 || bits > 8) {
    throw ContractError("bitdepth bits must be in [1, 8], got " + std::to_string(bits));
  }
  levels_ = static_cast<double>((1 << bits) - 1);
}

Vector BitdepthDefense::quantize(const Vector& x) const {
  return (x.array() * levels_).round().matrix() / levels_;
}

Vector BitdepthDefense::logits(const Vector& x) const {
  check_input(x);
  return base_->logits(quantize(x));
}

Vector BitdepthDefense::input_gradient(const Vector& x, int label, Loss loss) const {
  check_input(x);
  check_label(label);
  if (masked_gradient_) return Vector::Zero(x.size());
  return base_->input_gradient(quantize(x), label, loss);
}

double linear_boundary_distance(const LinearModel& model, const Vector& x, int label) {
  const Vector z = model.logits(x);
  if (label < 0 || label >= z.size()) throw ContractError("label out of range");
  if (argmax_lowest(z) != label) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < z.size(); ++j) {
    if (j == label) continue;
    const double norm = (model.weights().row(label) - model.weights().row(j)).norm();
    if (norm == 0.0) {
      if (model.biases()[label] == model.biases()[j]) {
        throw DegenerateError("classes " + std::to_string(label) + " and " + std::to_string(j) +
                              " have identical weights and biases");
      }
      continue;  // parallel logits never cross
    }
    best = std::min(best, (z[label] - z[j]) / norm);
  }
  return std::max(best, 0.0);
}

double linear_signed_distance(const LinearModel& model, const Vector& x, int label) {
  if (model.num_classes() != 2) {
    throw UnsupportedError("signed boundary distance is defined for binary linear models only");
  }
  if (label < 0 || label > 1) throw ContractError("label out of range");
  const int other = 1 - label;
  const Vector z = model.logits(x);
  const double norm = (model.weights().row(label) - model.weights().row(other)).norm();
  const double gap = z[label] - z[other];
  if (norm == 0.0) {
    if (gap == 0.0) throw DegenerateError("binary linear model has identical class rows");
    return gap > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
  }
  return gap / norm;
}

double linear_noise_error_rate(const LinearModel& model, const Vector& x, int label,
                               double sigma) {
  if (model.num_classes() != 2) {
    throw UnsupportedError(
        "exact noise error rate needs a binary linear model; use Monte Carlo for C > 2");
  }
  const gaussian::NoiseScale scale(sigma);
  const double d = linear_signed_distance(model, x, label);
  if (std::isinf(d)) return d > 0 ? 0.0 : 1.0;
  return gaussian::std_normal_cdf(-d / scale.value());
}

}  // namespace robustlab
