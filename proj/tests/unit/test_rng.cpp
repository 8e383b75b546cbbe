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

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/gaussian_math.hpp"
#include "core/rng.hpp"

namespace robustlab {
namespace {

TEST(RngStream, SameKeySameSequence) {
  RngStream a(42, "purpose", {1, 2});
  RngStream b(42, "purpose", {1, 2});
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStream, DistinctKeysDiffer) {
  const auto first = [](RngStream r) { return r(); };
  const std::uint64_t base = first(RngStream(42, "purpose", {1, 2}));
  EXPECT_NE(base, first(RngStream(43, "purpose", {1, 2})));
  EXPECT_NE(base, first(RngStream(42, "other", {1, 2})));
  EXPECT_NE(base, first(RngStream(42, "purpose", {2, 1})));
  EXPECT_NE(base, first(RngStream(42, "purpose", {1})));
  EXPECT_EQ(derive_seed(1, "x", {3}), derive_seed(1, "x", {3}));
  EXPECT_NE(derive_seed(1, "x", {3}), derive_seed(1, "x", {4}));
}

TEST(RngStream, UniformMoments) {
  RngStream r(7, "uniform");
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - std::pow(sum / n, 2), 1.0 / 12.0, 2e-3);
}

TEST(RngStream, NormalPassesKolmogorovSmirnov) {
  RngStream r(11, "normal");
  std::vector<double> xs(20000);
  for (double& x : xs) x = r.normal();
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = gaussian::std_normal_cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  // 1% critical value 1.63/sqrt(n).
  EXPECT_LT(d, 1.63 / std::sqrt(n));
}

TEST(RngStream, BernoulliRate) {
  RngStream r(5, "coin");
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += r.bernoulli(0.2);
  EXPECT_NEAR(hits / 100000.0, 0.2, 4.0 * std::sqrt(0.16 / 100000.0));
}

}  // namespace
}  // namespace robustlab
