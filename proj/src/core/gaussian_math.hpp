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
#include <span>

#include "core/table.hpp"

// Scalar mathematics of the half-space model: the standard normal cdf and
// its inverse, the distance/error-rate relation d = -σ Φ⁻¹(μ) for a linear
// decision boundary, and the Gaussian isoperimetric bounds built on it.
// Everything here is a pure function.
namespace robustlab::gaussian {

// Error rate / probability mass in [0, 1].
class Probability {
 public:
  explicit Probability(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// Per-coordinate standard deviation of isotropic noise N(0, σ²I); σ > 0.
class NoiseScale {
 public:
  explicit NoiseScale(double sigma);
  double value() const { return sigma_; }

 private:
  double sigma_;
};

class Dimension {
 public:
  explicit Dimension(std::int64_t n);
  std::int64_t value() const { return n_; }

 private:
  std::int64_t n_;
};

double std_normal_pdf(double t);

// Φ(t). Throws DomainError for non-finite t.
double std_normal_cdf(double t);

// Φ⁻¹(p) for p strictly inside (0, 1). Saturated Monte-Carlo estimates (0 or
// 1) are rejected with DomainError; callers decide what they mean.
double std_normal_cdf_inv(double p);

struct HalfspaceDistance {
  double distance;
  // True when μ > 1/2 and the negative distance -σΦ⁻¹(μ) was clamped to 0.
  bool clamped;
};

// Distance from the noise center to a half-space that captures a fraction μ
// of N(x₀, σ²I): -σΦ⁻¹(μ).
HalfspaceDistance halfspace_distance(NoiseScale sigma, Probability mu);

// Inverse relation: Φ(-d/σ). Requires d >= 0.
double halfspace_error_rate(NoiseScale sigma, double distance);

// Upper bound on the median distance from a noisy sample to the error set:
// 0 if μ >= 1/2, otherwise -σΦ⁻¹(μ) (equality for half-spaces).
double isoperimetric_median_bound(NoiseScale sigma, Probability mu);

// Smallest possible Gaussian measure of the ε-extension of a set with
// measure μ: Φ(Φ⁻¹(μ) + ε/σ).
double iso_extension_lower_bound(Probability mu, double eps, NoiseScale sigma);

// σ√n, the radius where N(0, σ²I_n) puts most of its mass.
double typical_noise_radius(NoiseScale sigma, Dimension n);

// Rows (σ, μ, d) for every pair in sigmas × mu_grid; each μ in (0, 1/2).
// Columns: sigma, mu, distance.
Table optimal_curve_table(std::span<const double> sigmas, std::span<const double> mu_grid);

}  // namespace robustlab::gaussian
