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

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/corruptions.hpp"
#include "core/dataio.hpp"
#include "core/errors.hpp"
#include "test_support.hpp"

namespace robustlab {
namespace {

Vector gray(int n, double v = 0.5) { return Vector::Constant(n, v); }

TEST(Corruptions, NamesRoundTrip) {
  for (CorruptionKind k : kAllCorruptions) EXPECT_EQ(corruption_from_name(corruption_name(k)), k);
  EXPECT_THROW(corruption_from_name("fog"), ContractError);
  EXPECT_TRUE(is_noise_corruption(CorruptionKind::kShotNoise));
  EXPECT_FALSE(is_noise_corruption(CorruptionKind::kContrast));
}

TEST(Corruptions, PepperZeroFractionBinomial) {
  RngStream rng(1, "pepper");
  const int n = 50000;
  const Vector y = apply_corruption(gray(n), {CorruptionKind::kPepperNoise, 0.2}, rng);
  const double zeros = (y.array() == 0.0).count();
  EXPECT_NEAR(zeros / n, 0.2, 3.0 * std::sqrt(0.2 * 0.8 / n));
}

TEST(Corruptions, ImpulseSetsExtremesEquiprobably) {
  RngStream rng(2, "impulse");
  const int n = 40000;
  const Vector y = apply_corruption(gray(n), {CorruptionKind::kImpulseNoise, 0.3}, rng);
  const double zeros = (y.array() == 0.0).count();
  const double ones = (y.array() == 1.0).count();
  EXPECT_NEAR((zeros + ones) / n, 0.3, 4.0 * std::sqrt(0.21 / n));
  EXPECT_NEAR(zeros / (zeros + ones), 0.5, 4.0 * std::sqrt(0.25 / (zeros + ones)));
}

TEST(Corruptions, ShotNoiseMomentsAndClipping) {
  RngStream rng(3, "shot");
  const int n = 40000;
  const double s = 20.0;
  const Vector y = apply_corruption(gray(n, 0.3), {CorruptionKind::kShotNoise, s}, rng);
  EXPECT_NEAR(y.mean(), 0.3, 4.0 * std::sqrt(0.3 / s / n));
  const double var = (y.array() - y.mean()).square().mean();
  EXPECT_NEAR(var, 0.3 / s, 0.1 * 0.3 / s);
  EXPECT_GE(y.minCoeff(), 0.0);
  EXPECT_LE(y.maxCoeff(), 1.0);
}

TEST(Corruptions, GaussianIsUnclippedWithRightVariance) {
  RngStream rng(4, "gauss");
  const int n = 40000;
  const Vector y = apply_corruption(gray(n, 0.95), {CorruptionKind::kGaussianNoise, 0.2}, rng);
  EXPECT_GT(y.maxCoeff(), 1.0);
  EXPECT_NEAR(y.mean(), 0.95, 4.0 * 0.2 / std::sqrt(n));
  EXPECT_NEAR((y.array() - 0.95).square().mean(), 0.04, 0.002);
}

TEST(Corruptions, DeterministicTransforms) {
  RngStream rng(5, "det");
  Vector x(4);
  x << 0.0, 0.2, 0.4, 1.0;
  const Vector c = apply_corruption(x, {CorruptionKind::kContrast, 0.5}, rng);
  EXPECT_NEAR(c[0], 0.4 + 0.5 * (0.0 - 0.4), 1e-15);
  EXPECT_NEAR(c.mean(), x.mean(), 1e-15);
  const Vector b = apply_corruption(x, {CorruptionKind::kBrightness, 0.1}, rng);
  EXPECT_NEAR(b[1], 0.3, 1e-15);
  EXPECT_EQ(b[3], 1.0);
}

TEST(Corruptions, PixelateAveragesBlocks) {
  RngStream rng(6, "pix");
  Vector x(16);
  for (int i = 0; i < 16; ++i) x[i] = i / 16.0;
  const Vector y = apply_corruption(x, {CorruptionKind::kPixelate, 2}, rng);
  // top-left block holds pixels 0, 1, 4, 5
  const double block = (0 + 1 + 4 + 5) / 64.0;
  for (int i : {0, 1, 4, 5}) EXPECT_NEAR(y[i], block, 1e-15);
  EXPECT_THROW(apply_corruption(x, {CorruptionKind::kPixelate, 3}, rng), ContractError);
  EXPECT_THROW(apply_corruption(Vector::Zero(5), {CorruptionKind::kPixelate, 1}, rng), ContractError);
}

TEST(SeverityTable, DefaultsMatchShippedConfig) {
  const SeverityTable shipped = SeverityTable::load(std::string(ROBUSTLAB_CONFIG_DIR) + "/severity_v1.cfg");
  EXPECT_EQ(shipped.to_text(), SeverityTable::defaults().to_text());
  EXPECT_EQ(shipped.parameter(CorruptionKind::kPepperNoise, 3), 0.2);
}

TEST(SeverityTable, ParseErrors) {
  EXPECT_THROW(SeverityTable::parse("version=2\n"), VersionError);
  EXPECT_THROW(SeverityTable::parse("version=1\ngaussian_noise=1,2,3\n"), ParseError);
  EXPECT_THROW(SeverityTable::parse("version=1\nfog=1,2,3,4,5\n"), ParseError);
  const auto t = SeverityTable::parse("version=1\n# comment\ncontrast=0.9,0.8,0.7,0.6,0.5\n");
  EXPECT_EQ(t.parameter(CorruptionKind::kContrast, 5), 0.5);
  EXPECT_THROW(t.parameter(CorruptionKind::kContrast, 6), ContractError);
  EXPECT_THROW(SeverityTable::load("/nonexistent/severity.cfg"), IoError);
}

TEST(Pca, MatchesEigenDecomposition) {
  RngStream rng(7, "pca-data");
  Dataset d;
  Vector scales(6);
  scales << 3.0, 2.0, 1.0, 0.5, 0.25, 0.1;
  for (int i = 0; i < 500; ++i) {
    d.inputs.push_back((testing::random_vector(rng, 6).array() * scales.array()).matrix());
    d.labels.push_back(i % 2);
  }
  const PcaBasis b = fit_pca(d, 3, 1);
  Matrix centered(500, 6);
  for (int i = 0; i < 500; ++i) centered.row(i) = (d.inputs[i] - b.mean).transpose();
  const Matrix cov = centered.transpose() * centered / 499.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  for (int k = 0; k < 3; ++k) {
    const Vector ref = es.eigenvectors().col(5 - k);
    EXPECT_NEAR(std::abs(b.components.row(k).dot(ref)), 1.0, 1e-6);
    EXPECT_NEAR(b.explained_variance[k], es.eigenvalues()[5 - k], 1e-6 * es.eigenvalues()[5]);
  }
  EXPECT_NEAR((b.components * b.components.transpose() - Matrix::Identity(3, 3)).norm(), 0.0, 1e-10);
}

TEST(Pca, FullBasisNoiseMatchesGaussianVariance) {
  const Dataset d = synth_blobs(2, 50, 5, 1.0, 0.5, 8);
  const PcaBasis b = fit_pca(d, 5, 2);
  RngStream rng(9, "pca-noise");
  const int trials = 20000;
  Vector var = Vector::Zero(5);
  for (int t = 0; t < trials; ++t) {
    const Vector y = apply_corruption(Vector::Zero(5), {CorruptionKind::kPcaNoise, 0.3}, rng, &b);
    var += y.cwiseProduct(y);
  }
  var /= trials;
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(var[i], 0.09, 4.0 * 0.09 * std::sqrt(2.0 / trials));
  RngStream r2(1, "x");
  EXPECT_THROW(apply_corruption(Vector::Zero(5), {CorruptionKind::kPcaNoise, 0.3}, r2), ContractError);
}

TEST(Suite, TableHasCleanRowAndMeans) {
  const Dataset d = synth_blobs(2, 10, 4, 1.0, 0.1, 1);
  const LinearModel m(Matrix::Identity(2, 4), Vector::Zero(2));
  const std::vector<CorruptionKind> kinds{CorruptionKind::kGaussianNoise, CorruptionKind::kPepperNoise};
  const SuiteResult r = evaluate_suite(m, d, kinds, SeverityTable::defaults(), 3, nullptr, true);
  const Table t = r.to_table();
  EXPECT_EQ(t.num_rows(), 11u);
  EXPECT_EQ(std::get<std::string>(t.at(0, 0)), "clean");
  EXPECT_DOUBLE_EQ(r.overall_mean, r.kind_means.at(CorruptionKind::kPepperNoise));
}

TEST(DefenseCheck, IdenticalModelsShowNoImprovement) {
  const Dataset d = synth_blobs(2, 20, 4, 1.0, 0.3, 1);
  const auto m = std::make_shared<LinearModel>(Matrix::Identity(2, 4), Vector::Zero(2));
  const std::vector<double> sigmas{0.1, 0.5};
  const DefenseReport r = defense_sanity_check(*m, *m, d, sigmas, 3, 4);
  EXPECT_TRUE(r.no_improvement);
  for (const auto& row : r.rows) EXPECT_EQ(row.delta, 0.0);
  EXPECT_THROW(defense_sanity_check(*m, *m, d, sigmas, 1, 4), ContractError);
}

}  // namespace
}  // namespace robustlab
