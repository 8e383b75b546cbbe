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

#include "core/gaussian_math.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "core/errors.hpp"

namespace robustlab::gaussian {
namespace {

// Rational approximation of Φ⁻¹ (P. J. Acklam), relative error ~1.2e-9;
// refined below with Newton steps on Φ.
constexpr std::array<double, 6> kCentralNum = {
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kCentralDen = {
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01,  -1.328068155288572e+01};
constexpr std::array<double, 6> kTailNum = {
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kTailDen = {
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00};
constexpr double kTailSplit = 0.02425;

// Initial guess for p <= 1/2.
double lower_half_guess(double p) {
  if (p < kTailSplit) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kTailNum[0] * q + kTailNum[1]) * q + kTailNum[2]) * q + kTailNum[3]) * q +
             kTailNum[4]) * q + kTailNum[5]) /
           ((((kTailDen[0] * q + kTailDen[1]) * q + kTailDen[2]) * q + kTailDen[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kCentralNum[0] * r + kCentralNum[1]) * r + kCentralNum[2]) * r + kCentralNum[3]) *
               r + kCentralNum[4]) * r + kCentralNum[5]) * q /
         (((((kCentralDen[0] * r + kCentralDen[1]) * r + kCentralDen[2]) * r + kCentralDen[3]) *
               r + kCentralDen[4]) * r + 1.0);
}

void require_open_unit(double mu, const char* what) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0, 1), got " + std::to_string(mu));
  }
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
  }
}

NoiseScale::NoiseScale(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("noise scale must be positive and finite, got " + std::to_string(sigma));
  }
}

Dimension::Dimension(std::int64_t n) : n_(n) {
  if (n < 1) throw DomainError("dimension must be >= 1, got " + std::to_string(n));
}

double std_normal_pdf(double t) {
  return std::exp(-0.5 * t * t) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double std_normal_cdf(double t) {
  if (!std::isfinite(t)) throw DomainError("std_normal_cdf: non-finite argument");
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double std_normal_cdf_inv(double p) {
  require_open_unit(p, "std_normal_cdf_inv: p");
  // 1 - p is exact for p in [1/2, 1), so the upper half reuses the lower
  // half where Φ has full relative precision.
  if (p > 0.5) return -std_normal_cdf_inv(1.0 - p);
  double x = lower_half_guess(p);
  for (int i = 0; i < 2; ++i) {
    const double density = std_normal_pdf(x);
    if (density <= 0.0) break;
    x -= (std_normal_cdf(x) - p) / density;
  }
  return x;
}

HalfspaceDistance halfspace_distance(NoiseScale sigma, Probability mu) {
  require_open_unit(mu.value(), "halfspace_distance: mu");
  if (mu.value() >= 0.5) return {0.0, mu.value() > 0.5};
  return {-sigma.value() * std_normal_cdf_inv(mu.value()), false};
}

double halfspace_error_rate(NoiseScale sigma, double distance) {
  if (!(distance >= 0.0)) {
    throw DomainError("halfspace_error_rate: distance must be >= 0");
  }
  if (std::isinf(distance)) return 0.0;
  return std_normal_cdf(-distance / sigma.value());
}

double isoperimetric_median_bound(NoiseScale sigma, Probability mu) {
  require_open_unit(mu.value(), "isoperimetric_median_bound: mu");
  if (mu.value() >= 0.5) return 0.0;
  return -sigma.value() * std_normal_cdf_inv(mu.value());
}

double iso_extension_lower_bound(Probability mu, double eps, NoiseScale sigma) {
  require_open_unit(mu.value(), "iso_extension_lower_bound: mu");
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw DomainError("iso_extension_lower_bound: eps must be finite and >= 0");
  }
  return std_normal_cdf(std_normal_cdf_inv(mu.value()) + eps / sigma.value());
}

double typical_noise_radius(NoiseScale sigma, Dimension n) {
  return sigma.value() * std::sqrt(static_cast<double>(n.value()));
}

Table optimal_curve_table(std::span<const double> sigmas, std::span<const double> mu_grid) {
  if (sigmas.empty() || mu_grid.empty()) {
    throw DomainError("optimal_curve_table: sigma and mu grids must be non-empty");
  }
  Table table({"sigma", "mu", "distance"});
  for (double s : sigmas) {
    const NoiseScale sigma(s);
    for (double m : mu_grid) {
      if (!(m > 0.0 && m < 0.5)) {
        throw DomainError("optimal_curve_table: each mu must lie in (0, 0.5), got " +
                          std::to_string(m));
      }
      table.add_row({s, m, halfspace_distance(sigma, Probability(m)).distance});
    }
  }
  return table;
}

}  // namespace robustlab::gaussian
