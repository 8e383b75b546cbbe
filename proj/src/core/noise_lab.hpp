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
#include <vector>

#include "core/attacks.hpp"
#include "core/dataio.hpp"
#include "core/models.hpp"
#include "core/table.hpp"

// Monte-Carlo estimators tying error rates in Gaussian noise to distances:
// μ̂(x₀, σ), the noise level σ(x₀, μ) at a target error rate, the median
// distance ε̂*_q from noisy samples to the nearest error, and the
// experiment drivers built on them.
namespace robustlab {

struct NoiseErrorEstimate {
  double mu_hat = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t n_errors = 0;
  double ci_low = 0.0;   // 95% Clopper-Pearson
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

// Exact two-sided Clopper-Pearson interval for k successes in n trials.
void clopper_pearson(std::int64_t k, std::int64_t n, double confidence, double* low, double* high);

// Misclassification rate of N(center, σ²I). Draw j uses the stream keyed
// (seed, "noise-draw", j). Requires n_samples >= 100.
NoiseErrorEstimate estimate_error_rate(const Classifier& model, const Vector& center, double sigma,
                                       int label, std::int64_t n_samples, std::uint64_t seed,
                                       bool clip = false);

struct SigmaAtErrorRate {
  double sigma_star = 0.0;
  double target_mu = 0.01;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  double mu_at_lo = 0.0;  // estimate that last moved the lower end
  double mu_at_hi = 0.0;  // estimate that last moved the upper end
  int evaluations = 0;
  bool converged = false;
};

struct SigmaSearch {
  double target_mu = 0.01;
  std::int64_t mc_samples = 2000;
  double sigma_start = 1e-3;
  double sigma_max = 10.0;
  int bisection_steps = 20;
  bool clip = false;
};

// σ at which the noise error rate around x reaches target_mu. A
// misclassified x gives 0 immediately. Otherwise σ doubles from
// sigma_start until μ̂ >= target (converged=false past sigma_max), then
// bisection_steps halvings. Every evaluation draws a fresh stream.
SigmaAtErrorRate sigma_at_error_rate(const Classifier& model, const Vector& x, int label,
                                     const SigmaSearch& search, std::uint64_t seed);

struct MedianNoisyDistance {
  double eps_star_hat = 0.0;
  std::int64_t n_noise_samples = 0;
  std::vector<double> distances;
  std::vector<char> converged;
  std::int64_t n_unconverged = 0;
};

// Lower-median over noisy draws x + σz of the nearest-error distance from
// each draw; draws that are already misclassified contribute 0.
MedianNoisyDistance median_noisy_distance(const Classifier& model, const Vector& center,
                                          double sigma, int label, std::int64_t n_noise_samples,
                                          const NearestErrorSearch& search, std::uint64_t seed,
                                          bool clip = false);

// Value at rank floor(q * (n - 1)) of the sorted sample; q = 0.5 is the
// lower median.
double sample_quantile(std::vector<double> values, double q);

struct SigmaSweepConfig {
  std::size_t group_size = 50;
  SigmaSearch sigma_search;
  NearestErrorSearch distance_search;
  std::uint64_t seed = 0;
};

struct SigmaSweepResult {
  // point_id, sigma_star, converged, distance, distance_converged
  Table per_point{{"point_id", "sigma_star", "converged", "distance", "distance_converged"}};
  // group, n_points, sigma_median, sigma_p25, sigma_p75, distance_median,
  // distance_p25, distance_p75, halfspace_distance
  Table groups{{"group", "n_points", "sigma_median", "sigma_p25", "sigma_p75", "distance_median",
                "distance_p25", "distance_p75", "halfspace_distance"}};
};

// σ(x, μ) against nearest-error distance, grouped sequentially by
// group_size with medians and quartile bands. halfspace_distance is the
// half-space prediction -σ_median Φ⁻¹(μ) for each group.
SigmaSweepResult sigma_sweep(const Classifier& model, const Dataset& data, const SigmaSweepConfig& config);

struct IsoConfig {
  double sigma = 0.1;
  std::int64_t mc_samples = 10000;
  std::int64_t noise_samples = 1000;
  NearestErrorSearch search;
  // Relative slack on the conservative bound before a point is flagged.
  double slack = 0.05;
  std::uint64_t seed = 0;
  bool clip = false;
};

// Per point: μ̂ with CI, ε̂*, the isoperimetric bound at μ̂, and a violation
// flag set when ε̂* > (1 + slack) · (-σ Φ⁻¹(ci_low)). A zero μ̂ or ci_low
// gives an infinite bound.
// Columns point_id, mu_hat, ci_low, ci_high, eps_star, bound, violation.
Table iso_gap_report(const Classifier& model, const Dataset& data, const IsoConfig& config);

// The isoperimetric bound with the degenerate ends handled: +inf at μ = 0,
// 0 at μ >= 1/2.
double median_bound_or_inf(double sigma, double mu);

// Survival table of per-point error rates: for log-spaced thresholds from
// 1/n to 1, the fraction of points with μ̂ >= threshold.
// Columns threshold, fraction.
Table error_rate_cdf(const Classifier& model, const Dataset& data, double sigma,
                     std::int64_t n_samples_per_point, std::uint64_t seed, int n_thresholds = 41,
                     bool clip = false);

}  // namespace robustlab
