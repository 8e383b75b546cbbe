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

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/dataio.hpp"
#include "core/models.hpp"
#include "core/rng.hpp"
#include "core/table.hpp"

namespace robustlab {

enum class CorruptionKind {
  kGaussianNoise,
  kShotNoise,
  kImpulseNoise,
  kPepperNoise,
  kContrast,
  kBrightness,
  kPixelate,
  kPcaNoise,
};

inline constexpr std::array<CorruptionKind, 8> kAllCorruptions = {
    CorruptionKind::kGaussianNoise, CorruptionKind::kShotNoise,  CorruptionKind::kImpulseNoise,
    CorruptionKind::kPepperNoise,   CorruptionKind::kContrast,   CorruptionKind::kBrightness,
    CorruptionKind::kPixelate,      CorruptionKind::kPcaNoise};

std::string_view corruption_name(CorruptionKind kind);
CorruptionKind corruption_from_name(std::string_view name);
bool is_noise_corruption(CorruptionKind kind);

// Top-k principal directions of a dataset.
struct PcaBasis {
  Vector mean;
  Matrix components;  // k x n, orthonormal rows
  Vector explained_variance;
  int k() const { return static_cast<int>(components.rows()); }
};

// One corruption with its scalar parameter:
//   gaussian_noise σ, shot_noise photon scale s, impulse_noise fraction,
//   pepper_noise p, contrast factor, brightness delta, pixelate block side,
//   pca_noise σ (needs a basis).
struct Corruption {
  CorruptionKind kind;
  double param;
};

// Applies one corruption in memory. Pixel-semantics kinds clip to [0,1];
// gaussian_noise and pca_noise do not. pixelate treats x as a square
// single-channel image and needs a block side dividing the image side.
Vector apply_corruption(const Vector& x, const Corruption& c, RngStream& rng,
                        const PcaBasis* basis = nullptr);

// Severity 1..5 parameter table, read from a versioned key=value file:
//   version=1
//   gaussian_noise=0.04,0.06,...
class SeverityTable {
 public:
  static SeverityTable defaults();
  static SeverityTable parse(const std::string& text);
  static SeverityTable load(const std::string& path);

  double parameter(CorruptionKind kind, int severity) const;
  Corruption at(CorruptionKind kind, int severity) const { return {kind, parameter(kind, severity)}; }
  std::string to_text() const;

 private:
  std::map<CorruptionKind, std::array<double, 5>> params_;
};

// Top-k eigenvectors of the centered sample covariance by power iteration
// with deflation (200 iterations per component, tolerance 1e-10), with
// Gram-Schmidt against earlier components on every iteration.
PcaBasis fit_pca(const Dataset& data, int k, std::uint64_t seed = 0);

struct SuiteEntry {
  CorruptionKind kind;
  int severity;
  double accuracy;
};

struct SuiteResult {
  double clean_accuracy = 0.0;
  std::vector<SuiteEntry> entries;
  std::map<CorruptionKind, double> kind_means;
  double overall_mean = 0.0;
  bool gaussian_omitted = false;

  // kind, severity, accuracy; first row is `clean,0,<clean accuracy>`.
  Table to_table() const;
  std::string summary_json() const;
};

// Accuracy on corrupted copies for every (kind, severity 1..5). Point i at
// (kind, severity) draws from the stream (seed, "corrupt", kind, severity, i).
SuiteResult evaluate_suite(const Classifier& model, const Dataset& data,
                           std::span<const CorruptionKind> kinds, const SeverityTable& table,
                           std::uint64_t seed, const PcaBasis* basis = nullptr,
                           bool omit_gaussian_from_mean = false);

struct DefenseRow {
  double sigma;
  double acc_base;
  double acc_base_std;
  double acc_defended;
  double acc_defended_std;
  double delta;  // acc_defended - acc_base
};

struct DefenseReport {
  std::vector<DefenseRow> rows;
  double threshold = 0.02;
  // Δ <= threshold at every σ.
  bool no_improvement = true;

  // sigma, acc_base, acc_base_std, acc_defended, acc_defended_std, delta
  Table to_table() const;
};

// Gaussian-noise accuracy of both models over `trials` independent noise
// draws per σ. Both models see identical noisy inputs in each trial.
DefenseReport defense_sanity_check(const Classifier& base, const Classifier& defended,
                                   const Dataset& data, std::span<const double> sigma_grid,
                                   int trials, std::uint64_t seed, double threshold = 0.02);

}  // namespace robustlab
