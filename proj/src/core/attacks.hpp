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
#include <optional>
#include <span>

#include "core/dataio.hpp"
#include "core/models.hpp"
#include "core/table.hpp"

namespace robustlab {

enum class Norm { kL2, kLinf };

struct PgdConfig {
  Norm norm = Norm::kL2;
  double epsilon = 1.0;
  int steps = 100;
  double step_size = 1.0 / 25.0;
  std::optional<int> target;  // targeted attack when set
  bool random_start = false;
  // Return as soon as an iterate succeeds instead of running all steps and
  // keeping the lowest-margin success. Only success matters to the
  // nearest-error bisection, which enables this.
  bool stop_on_success = false;
  std::uint64_t seed = 0;

  // 100 steps of ε/25.
  static PgdConfig standard(Norm norm, double epsilon);
  void validate() const;
  // Same config at a new radius, keeping the step_size / epsilon ratio.
  PgdConfig rescaled(double new_epsilon) const;
};

struct AttackResult {
  Vector adversarial_point;
  bool success = false;
  double distance = 0.0;  // ‖adversarial_point - x‖ in the configured norm
  int predicted = 0;
};

// Projected gradient descent on the margin loss. Untargeted: drives
// z[label] - max_{j≠label} z[j] below zero. Targeted: drives the target's
// own margin above zero. L2 steps follow the normalized gradient, L∞ steps
// its sign; each iterate is projected back onto the ε-ball around x.
// `start` warm-starts from a point (projected into the ball).
AttackResult pgd(const Classifier& model, const Vector& x, int label, const PgdConfig& config,
                 const std::optional<Vector>& start = std::nullopt);

struct NearestErrorSearch {
  double eps_lo = 0.0;
  double eps_hi = 1.0;
  int bisection_iters = 12;
  int refine_halvings = 20;
  // Radius and step size are rescaled per trial radius.
  PgdConfig pgd_template = [] {
    PgdConfig c = PgdConfig::standard(Norm::kL2, 1.0);
    c.steps = 200;
    return c;
  }();

  void validate() const;
};

struct BoundaryDistanceEstimate {
  double distance = 0.0;  // L2
  Vector witness;         // misclassified whenever distance > 0
  Vector last_correct;    // the refinement point just short of the witness
  bool converged = false;
};

// Smallest successful PGD radius by bisection on ε in [eps_lo, eps_hi], then
// a binary search along the segment x → witness for the boundary crossing.
// When nothing is found at eps_hi the estimate is eps_hi, converged=false.
BoundaryDistanceEstimate nearest_error(const Classifier& model, const Vector& x, int label,
                                       const NearestErrorSearch& search);

// Columns point_id, distance, converged.
Table nearest_error_batch(const Classifier& model, const Dataset& data,
                          const NearestErrorSearch& search);

// Fraction of points that PGD fails to break at each ε of an ascending grid.
// Per point the attack at a larger ε warm-starts from the previous iterate
// and a point broken at ε stays broken above it. ε = 0 is clean accuracy.
// Columns epsilon, adversarial_accuracy.
Table robustness_curve(const Classifier& model, const Dataset& data,
                       std::span<const double> eps_grid, const PgdConfig& config_template);

double norm_of(const Vector& v, Norm norm);

}  // namespace robustlab
