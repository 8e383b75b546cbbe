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
#include <vector>

#include "core/types.hpp"

namespace robustlab {

enum class Loss { kCrossEntropy, kMargin };
enum class Activation : std::uint8_t { kIdentity = 0, kRelu = 1 };
enum class ModelKind : std::uint8_t { kLinear = 0, kMlp = 1, kBitdepth = 2 };

// Prediction/gradient contract shared by every model. A classifier is
// immutable once built; all methods are const and thread-safe. The error set
// for a point with label y is implicit: {x : predict(x) != y}.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual ModelKind kind() const = 0;
  virtual int input_dim() const = 0;
  virtual int num_classes() const = 0;
  virtual Vector logits(const Vector& x) const = 0;

  // Gradient with respect to x of
  //   cross entropy: -log softmax(z)[label]
  //   margin:        z[label] - max_{j != label} z[j]
  virtual Vector input_gradient(const Vector& x, int label, Loss loss) const = 0;

  // argmax of logits, ties broken toward the lowest class index.
  int predict(const Vector& x) const;

 protected:
  void check_input(const Vector& x) const;
  void check_label(int label) const;
};

// argmax with lowest-index tie-break.
int argmax_lowest(const Vector& z);
// z[label] - max_{j != label} z[j]; `runner_up` receives that j.
double margin_of(const Vector& z, int label, int* runner_up = nullptr);
Vector softmax(const Vector& z);
// d(loss)/d(logits) for the given loss at logits z.
Vector loss_logit_gradient(const Vector& z, int label, Loss loss);
double cross_entropy(const Vector& z, int label);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::kIdentity;
};

// Parameter gradient buffers matching a layer stack.
struct LayerGradient {
  Matrix weights;
  Vector bias;
};

// Shared forward/backward over a chain of dense layers. Used by both model
// types and by the trainer.
class DenseStack {
 public:
  explicit DenseStack(std::vector<DenseLayer> layers);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  int input_dim() const { return static_cast<int>(layers_.front().weights.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().weights.rows()); }

  Vector forward(const Vector& x) const;
  // Backpropagates dlogits. Returns d/dx; accumulates parameter gradients
  // into `grads` (sized like layers()) when non-null.
  Vector backward(const Vector& x, const Vector& dlogits,
                  std::vector<LayerGradient>* grads) const;

 private:
  std::vector<DenseLayer> layers_;
};

class LinearModel final : public Classifier {
 public:
  // weights: C x n, biases: C. Requires C >= 2 and finite entries.
  LinearModel(Matrix weights, Vector biases);

  ModelKind kind() const override { return ModelKind::kLinear; }
  int input_dim() const override { return static_cast<int>(stack_.input_dim()); }
  int num_classes() const override { return stack_.output_dim(); }
  Vector logits(const Vector& x) const override;
  Vector input_gradient(const Vector& x, int label, Loss loss) const override;

  const Matrix& weights() const { return stack_.layers().front().weights; }
  const Vector& biases() const { return stack_.layers().front().bias; }
  const DenseStack& stack() const { return stack_; }

 private:
  DenseStack stack_;
};

// Fully connected ReLU network; the final layer is the identity and its
// width is the number of classes.
class MlpModel final : public Classifier {
 public:
  explicit MlpModel(std::vector<DenseLayer> layers);

  ModelKind kind() const override { return ModelKind::kMlp; }
  int input_dim() const override { return stack_.input_dim(); }
  int num_classes() const override { return stack_.output_dim(); }
  Vector logits(const Vector& x) const override;
  Vector input_gradient(const Vector& x, int label, Loss loss) const override;

  const std::vector<DenseLayer>& layers() const { return stack_.layers(); }
  const DenseStack& stack() const { return stack_; }

 private:
  DenseStack stack_;
};

// Bit-depth reduction defense. Each coordinate is rounded to the lattice
// k / (2^bits - 1) before the base model sees it. Coordinates in [0,1] land
// on the 2^bits levels of [0,1]; out-of-range values (unclipped Gaussian
// noise) continue the same lattice rather than being clipped.
//
// input_gradient is straight-through (the base model's gradient at the
// quantized point). With masked_gradient set it returns zeros instead,
// which is what a gradient-masking defense looks like to PGD.
class BitdepthDefense final : public Classifier {
 public:
  BitdepthDefense(std::shared_ptr<const Classifier> base, int bits, bool masked_gradient = false);

  ModelKind kind() const override { return ModelKind::kBitdepth; }
  int input_dim() const override { return base_->input_dim(); }
  int num_classes() const override { return base_->num_classes(); }
  Vector logits(const Vector& x) const override;
  Vector input_gradient(const Vector& x, int label, Loss loss) const override;

  Vector quantize(const Vector& x) const;
  int bits() const { return bits_; }
  bool masked_gradient() const { return masked_gradient_; }
  const std::shared_ptr<const Classifier>& base() const { return base_; }

 private:
  std::shared_ptr<const Classifier> base_;
  int bits_;
  bool masked_gradient_;
  double levels_;
};

// Exact L2 distance from x to the decision boundary of a linear model:
// 0 if x is misclassified, otherwise
//   min_{j != label} (z_label - z_j) / ||w_label - w_j||.
// Throws DegenerateError when two rows and biases coincide.
double linear_boundary_distance(const LinearModel& model, const Vector& x, int label);

// Signed distance for a binary linear model: positive on the label's side.
double linear_signed_distance(const LinearModel& model, const Vector& x, int label);

// Exact Gaussian error rate Φ(-d/σ) of a binary linear model around x with
// d the signed boundary distance. Throws UnsupportedError for C > 2.
double linear_noise_error_rate(const LinearModel& model, const Vector& x, int label, double sigma);

}  // namespace robustlab
