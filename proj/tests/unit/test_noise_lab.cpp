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

#include "core/dataio.hpp"
#include "core/errors.hpp"
#include "core/gaussian_math.hpp"
#include "core/noise_lab.hpp"
#include "test_support.hpp"

namespace robustlab {
namespace {

// Binary linear model whose boundary sits at distance d from the origin along e0.
std::shared_ptr<LinearModel> halfspace(int dim, double d) {
  Matrix w = Matrix::Zero(2, dim);
  w(1, 0) = 1.0;
  Vector b(2);
  b << 0.0, -d;
  return std::make_shared<LinearModel>(w, b);
}

TEST(ClopperPearson, KnownValues) {
  double lo = 0, hi = 0;
  clopper_pearson(0, 10, 0.95, &lo, &hi);
  EXPECT_EQ(lo, 0.0);
  EXPECT_NEAR(hi, 1.0 - std::pow(0.025, 0.1), 1e-10);
  clopper_pearson(10, 10, 0.95, &lo, &hi);
  EXPECT_NEAR(lo, std::pow(0.025, 0.1), 1e-10);
  EXPECT_EQ(hi, 1.0);
  clopper_pearson(5, 20, 0.95, &lo, &hi);
  EXPECT_NEAR(lo, 0.0865715, 1e-6);
  EXPECT_NEAR(hi, 0.4910459, 1e-6);
}

TEST(EstimateErrorRate, AgreesWithClosedForm) {
  const auto m = halfspace(10, 0.2);
  const NoiseErrorEstimate e = estimate_error_rate(*m, Vector::Zero(10), 0.1, 0, 20000, 3);
  const double mu = gaussian::std_normal_cdf(-2.0);
  EXPECT_LE(e.ci_low, mu);
  EXPECT_GE(e.ci_high, mu);
  EXPECT_EQ(e.n_samples, 20000);
  EXPECT_EQ(e.mu_hat, e.n_errors / 20000.0);
  EXPECT_EQ(estimate_error_rate(*m, Vector::Zero(10), 0.1, 0, 1000, 3).n_errors,
            estimate_error_rate(*m, Vector::Zero(10), 0.1, 0, 1000, 3).n_errors);
  EXPECT_THROW(estimate_error_rate(*m, Vector::Zero(10), 0.1, 0, 50, 3), ContractError);
}

TEST(SigmaAtErrorRate, RecoversHalfspaceSigma) {
  const auto m = halfspace(20, 0.3);
  SigmaSearch s;
  s.mc_samples = 20000;
  const auto r = sigma_at_error_rate(*m, Vector::Zero(20), 0, s, 4);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.sigma_star, 0.3 / 2.3263478740408408, 0.05 * 0.3 / 2.3263);
  EXPECT_LE(r.sigma_lo, r.sigma_star);
  EXPECT_GE(r.sigma_hi, r.sigma_star);
}

TEST(SigmaAtErrorRate, MisclassifiedPointGetsZero) {
  const auto m = halfspace(4, -0.1);
  EXPECT_EQ(sigma_at_error_rate(*m, Vector::Zero(4), 0, SigmaSearch{}, 1).sigma_star, 0.0);
}

TEST(SigmaAtErrorRate, ConstantCorrectModelDoesNotConverge) {
  const LinearModel m(Matrix::Zero(2, 3), Vector::Unit(2, 0));
  const auto r = sigma_at_error_rate(m, Vector::Zero(3), 0, SigmaSearch{}, 1);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.sigma_hi, 10.0);
}

TEST(MedianNoisyDistance, HalfspaceEquality) {
  const auto m = halfspace(16, 0.5);
  const double sigma = 0.1;
  NearestErrorSearch s;
  s.eps_hi = 2.0;
  const auto r = median_noisy_distance(*m, Vector::Zero(16), sigma, 0, 201, s, 7);
  // Noisy distances are 0.5 - sigma*Z, so the median is near 0.5.
  EXPECT_NEAR(r.eps_star_hat, 0.5, 3.0 * 1.2533 * sigma / std::sqrt(201.0));
  EXPECT_EQ(r.distances.size(), 201u);
}

TEST(SampleQuantile, LowerMedianConvention) {
  EXPECT_EQ(sample_quantile({4.0, 1.0, 3.0, 2.0}, 0.5), 2.0);
  EXPECT_EQ(sample_quantile({5.0, 1.0, 3.0}, 0.5), 3.0);
  EXPECT_EQ(sample_quantile({5.0, 1.0, 3.0}, 0.0), 1.0);
  EXPECT_EQ(sample_quantile({5.0, 1.0, 3.0}, 1.0), 5.0);
  EXPECT_THROW(sample_quantile({}, 0.5), ContractError);
}

TEST(SigmaSweep, GroupsAndHalfspaceColumn) {
  const Dataset d = synth_blobs(2, 6, 4, 1.0, 0.2, 3);
  Matrix w(2, 4);
  w << 1, 0, 0, 0, 0, 1, 0, 0;
  const LinearModel m(w, Vector::Zero(2));
  SigmaSweepConfig cfg;
  cfg.group_size = 4;
  cfg.sigma_search.mc_samples = 500;
  cfg.distance_search.eps_hi = 3.0;
  const SigmaSweepResult r = sigma_sweep(m, d, cfg);
  EXPECT_EQ(r.per_point.num_rows(), d.size());
  EXPECT_EQ(r.groups.num_rows(), 3u);
  for (std::size_t g = 0; g < r.groups.num_rows(); ++g) {
    EXPECT_NEAR(r.groups.number(g, "halfspace_distance"),
                r.groups.number(g, "sigma_median") * 2.3263478740408408, 1e-9);
  }
}

TEST(IsoGapReport, ColumnsAndBoundConsistency) {
  const Dataset d = synth_blobs(2, 3, 6, 0.4, 0.05, 5);
  Matrix w(2, 6);
  w.setZero();
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  const LinearModel m(w, Vector::Zero(2));
  IsoConfig cfg;
  cfg.sigma = 0.2;
  cfg.mc_samples = 2000;
  cfg.noise_samples = 21;
  const Table t = iso_gap_report(m, d, cfg);
  EXPECT_EQ(t.columns(), (std::vector<std::string>{"point_id", "mu_hat", "ci_low", "ci_high", "eps_star",
                                                   "bound", "violation"}));
  for (std::size_t r = 0; r < t.num_rows(); ++r) {
    EXPECT_EQ(t.number(r, "bound"), median_bound_or_inf(0.2, t.number(r, "mu_hat")));
    const bool flagged = t.number(r, "eps_star") > 1.05 * median_bound_or_inf(0.2, t.number(r, "ci_low"));
    EXPECT_EQ(t.number(r, "violation") != 0.0, flagged);
  }
}

TEST(ErrorRateCdf, MonotoneFractions) {
  const Dataset d = synth_blobs(2, 10, 3, 0.3, 0.2, 6);
  const LinearModel m(Matrix::Identity(2, 3), Vector::Zero(2));
  const Table t = error_rate_cdf(m, d, 0.2, 1000, 7);
  ASSERT_EQ(t.num_rows(), 41u);
  EXPECT_DOUBLE_EQ(t.number(0, "threshold"), 1e-3);
  EXPECT_DOUBLE_EQ(t.number(40, "threshold"), 1.0);
  for (std::size_t r = 1; r < t.num_rows(); ++r) {
    EXPECT_LE(t.number(r, "fraction"), t.number(r - 1, "fraction"));
  }
  EXPECT_THROW(error_rate_cdf(m, d, 0.2, 999, 7), ContractError);
}

}  // namespace
}  // namespace robustlab
