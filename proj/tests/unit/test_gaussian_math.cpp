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

#include <cmath>
#include <limits>
#include <vector>

#include "core/errors.hpp"
#include "core/gaussian_math.hpp"
#include "test_support.hpp"

namespace robustlab::gaussian {
namespace {

using robustlab::testing::phi_by_quadrature;

// Inverse of the quadrature CDF by bisection; slow but independent.
double phi_inv_by_bisection(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(StdNormalCdf, MatchesQuadrature) {
  for (double t : {-8.0, -5.0, -3.0, -1.5, -0.3, 0.0, 0.4, 1.0, 2.3263, 4.0, 6.0}) {
    const double expected = phi_by_quadrature(t);
    EXPECT_NEAR(std_normal_cdf(t), expected, 1e-13 + 1e-10 * expected) << "t=" << t;
  }
}

TEST(StdNormalCdf, SymmetryAndLimits) {
  for (double t = -9.0; t <= 9.0; t += 0.37) {
    EXPECT_NEAR(std_normal_cdf(t) + std_normal_cdf(-t), 1.0, 1e-15);
  }
  EXPECT_EQ(std_normal_cdf(0.0), 0.5);
  EXPECT_NEAR(std_normal_cdf(-2.3263479), 0.01, 1e-7);
  EXPECT_NEAR(std_normal_cdf(1.0), 0.8413447, 1e-7);
  EXPECT_THROW(std_normal_cdf(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(std_normal_cdf(std::nan("")), DomainError);
}

TEST(StdNormalCdfInv, AgreesWithBisectionInverse) {
  for (double p : {1e-12, 1e-8, 1e-4, 0.001, 0.01, 0.2, 0.5, 0.7, 0.99, 1 - 1e-9}) {
    const double x = std_normal_cdf_inv(p);
    EXPECT_NEAR(x, phi_inv_by_bisection(p), 1e-8 * std::max(1.0, std::abs(x))) << "p=" << p;
  }
}

TEST(StdNormalCdfInv, RoundTripOverLogGrid) {
  double worst = 0.0;
  const double lo = std::log(1e-12), hi = std::log(1.0 - 1e-12);
  for (int i = 0; i < 200; ++i) {
    const double p = std::exp(lo + (hi - lo) * i / 199.0);
    worst = std::max(worst, std::abs(std_normal_cdf(std_normal_cdf_inv(p)) - p));
    EXPECT_EQ(std_normal_cdf_inv(p) < 0.0, p < 0.5);
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(StdNormalCdfInv, RejectsClosedEndpoints) {
  EXPECT_THROW(std_normal_cdf_inv(0.0), DomainError);
  EXPECT_THROW(std_normal_cdf_inv(1.0), DomainError);
  EXPECT_THROW(std_normal_cdf_inv(-0.1), DomainError);
  EXPECT_THROW(std_normal_cdf_inv(std::nan("")), DomainError);
}

TEST(StrongTypes, ValidateOnConstruction) {
  EXPECT_THROW(Probability(1.5), DomainError);
  EXPECT_THROW(Probability(-1e-3), DomainError);
  EXPECT_THROW(NoiseScale(0.0), DomainError);
  EXPECT_THROW(NoiseScale(-1.0), DomainError);
  EXPECT_THROW(Dimension(0), DomainError);
  EXPECT_NO_THROW(Probability(0.0));
  EXPECT_NO_THROW(Probability(1.0));
}

TEST(HalfspaceDistance, ClosedFormValues) {
  const auto d = halfspace_distance(NoiseScale(0.1), Probability(0.01));
  EXPECT_NEAR(d.distance, 0.2326, 5e-4);
  EXPECT_FALSE(d.clamped);
  EXPECT_NEAR(halfspace_distance(NoiseScale(0.08), Probability(0.001)).distance, 0.247, 2e-3);
  EXPECT_EQ(halfspace_distance(NoiseScale(0.3), Probability(0.5)).distance, 0.0);
}

TEST(HalfspaceDistance, ClampsAboveOneHalf) {
  const auto d = halfspace_distance(NoiseScale(0.1), Probability(0.8));
  EXPECT_EQ(d.distance, 0.0);
  EXPECT_TRUE(d.clamped);
}

TEST(HalfspaceDistance, ZeroErrorRateIsOutOfDomain) {
  EXPECT_THROW(halfspace_distance(NoiseScale(0.1), Probability(0.0)), DomainError);
}

TEST(HalfspaceDistance, HighDimensionalExampleUsesClosedForm) {
  // sigma = 0.04, mu = 0.0021: the closed form gives about 0.1145.
  const auto d = halfspace_distance(NoiseScale(0.04), Probability(0.0021));
  EXPECT_NEAR(d.distance, 0.1145, 5e-4);
}

TEST(HalfspaceErrorRate, InvertsDistance) {
  for (double mu : {1e-6, 1e-3, 0.01, 0.2}) {
    const double d = halfspace_distance(NoiseScale(0.25), Probability(mu)).distance;
    EXPECT_NEAR(halfspace_error_rate(NoiseScale(0.25), d), mu, 1e-12 + 1e-9 * mu);
  }
  EXPECT_THROW(halfspace_error_rate(NoiseScale(0.1), -1.0), DomainError);
}

TEST(IsoperimetricBound, EqualsHalfspaceDistanceBelowOneHalf) {
  EXPECT_DOUBLE_EQ(isoperimetric_median_bound(NoiseScale(0.1), Probability(0.01)),
                   halfspace_distance(NoiseScale(0.1), Probability(0.01)).distance);
  EXPECT_EQ(isoperimetric_median_bound(NoiseScale(0.1), Probability(0.7)), 0.0);
}

TEST(IsoExtension, MonotoneAndReducesToMuAtZero) {
  const Probability mu(0.01);
  EXPECT_NEAR(iso_extension_lower_bound(mu, 0.0, NoiseScale(0.1)), 0.01, 1e-12);
  double prev = 0.0;
  for (double eps = 0.0; eps <= 1.0; eps += 0.05) {
    const double v = iso_extension_lower_bound(mu, eps, NoiseScale(0.1));
    EXPECT_GE(v, prev);
    prev = v;
  }
  // Extending by the half-space distance reaches one half.
  const double d = halfspace_distance(NoiseScale(0.1), mu).distance;
  EXPECT_NEAR(iso_extension_lower_bound(mu, d, NoiseScale(0.1)), 0.5, 1e-9);
  EXPECT_THROW(iso_extension_lower_bound(mu, -0.1, NoiseScale(0.1)), DomainError);
}

TEST(TypicalRadius, ClosedFormValues) {
  EXPECT_NEAR(typical_noise_radius(NoiseScale(0.1), Dimension(3072)), 5.543, 0.01);
  EXPECT_NEAR(typical_noise_radius(NoiseScale(0.1), Dimension(3)), 0.173, 0.005);
}

TEST(OptimalCurveTable, GridLayout) {
  const std::vector<double> sigmas{0.05, 0.1};
  const std::vector<double> mus{0.01, 0.1, 0.3};
  const Table t = optimal_curve_table(sigmas, mus);
  ASSERT_EQ(t.num_rows(), 6u);
  EXPECT_EQ(t.columns(), (std::vector<std::string>{"sigma", "mu", "distance"}));
  for (std::size_t r = 0; r < t.num_rows(); ++r) {
    const double s = t.number(r, "sigma");
    const double m = t.number(r, "mu");
    EXPECT_NEAR(t.number(r, "distance"), -s * std_normal_cdf_inv(m), 1e-15);
  }
  const std::vector<double> bad{0.5};
  EXPECT_THROW(optimal_curve_table(sigmas, bad), DomainError);
}

}  // namespace
}  // namespace robustlab::gaussian
