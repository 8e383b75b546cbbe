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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "robustlab/robustlab.h"

namespace {

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(rl_version(), "0.1.0");
  EXPECT_STREQ(rl_status_name(RL_OK), "ok");
  EXPECT_STREQ(rl_status_name(RL_ERR_DEGENERATE), "degenerate input");
}

TEST(CApi, DomainErrorSetsMessageAndLeavesOutput) {
  double out = 42.0;
  EXPECT_EQ(rl_std_normal_cdf_inv(0.0, &out), RL_ERR_DOMAIN);
  EXPECT_EQ(out, 42.0);
  EXPECT_NE(std::string(rl_last_error()), "");
  EXPECT_EQ(rl_std_normal_cdf_inv(0.5, &out), RL_OK);
  EXPECT_EQ(out, 0.0);
  EXPECT_STREQ(rl_last_error(), "");
}

TEST(CApi, NullArgumentsAreContractErrors) {
  EXPECT_EQ(rl_std_normal_cdf(0.0, nullptr), RL_ERR_CONTRACT);
  EXPECT_EQ(rl_model_load(nullptr, nullptr), RL_ERR_CONTRACT);
}

TEST(CApi, HalfspaceDistanceAndClamp) {
  double d = 0;
  int clamped = -1;
  ASSERT_EQ(rl_halfspace_distance(0.1, 0.01, &d, &clamped), RL_OK);
  EXPECT_NEAR(d, 0.2326, 5e-4);
  EXPECT_EQ(clamped, 0);
  ASSERT_EQ(rl_halfspace_distance(0.1, 0.9, &d, &clamped), RL_OK);
  EXPECT_EQ(d, 0.0);
  EXPECT_EQ(clamped, 1);
}

TEST(CApi, LinearModelLifecycle) {
  const double w[] = {0.0, 0.0, 3.0, 4.0};
  const double b[] = {0.0, 0.0};
  rl_model* m = nullptr;
  ASSERT_EQ(rl_model_linear_create(2, 2, w, b, &m), RL_OK);
  EXPECT_EQ(rl_model_get_kind(m), RL_MODEL_LINEAR);
  EXPECT_EQ(rl_model_input_dim(m), 2);
  const double x[] = {-3.0, -4.0};
  int pred = -1;
  ASSERT_EQ(rl_model_predict(m, x, 2, &pred), RL_OK);
  EXPECT_EQ(pred, 0);
  double dist = 0;
  ASSERT_EQ(rl_linear_boundary_distance(m, x, 2, 0, &dist), RL_OK);
  EXPECT_NEAR(dist, 5.0, 1e-12);
  double grad[2];
  ASSERT_EQ(rl_model_input_gradient(m, x, 2, 0, RL_LOSS_MARGIN, grad), RL_OK);
  EXPECT_EQ(grad[0], -3.0);
  EXPECT_EQ(rl_model_predict(m, x, 3, &pred), RL_ERR_CONTRACT);

  const auto path = (std::filesystem::temp_directory_path() / "rl_capi.isrb").string();
  ASSERT_EQ(rl_model_save(m, path.c_str()), RL_OK);
  rl_model* back = nullptr;
  ASSERT_EQ(rl_model_load(path.c_str(), &back), RL_OK);
  char h1[17], h2[17];
  ASSERT_EQ(rl_model_hash(m, h1, sizeof h1), RL_OK);
  ASSERT_EQ(rl_model_hash(back, h2, sizeof h2), RL_OK);
  EXPECT_STREQ(h1, h2);
  rl_model_free(back);
  rl_model_free(m);
}

TEST(CApi, ParseErrorReportsOffset) {
  const auto path = (std::filesystem::temp_directory_path() / "rl_capi_trunc.isrb").string();
  std::ofstream(path, std::ios::binary) << "ISRB";
  rl_model* m = nullptr;
  EXPECT_EQ(rl_model_load(path.c_str(), &m), RL_ERR_PARSE);
  EXPECT_EQ(m, nullptr);
  EXPECT_EQ(rl_last_error_offset(), 4);
  EXPECT_EQ(rl_model_load("/nonexistent/model.isrb", &m), RL_ERR_IO);
  EXPECT_EQ(rl_last_error_offset(), -1);
}

TEST(CApi, MlpAndBitdepth) {
  const int widths[] = {2, 2, 2};
  const int acts[] = {RL_ACT_RELU, RL_ACT_IDENTITY};
  const double w[] = {1.0, -1.0, 0.5, 2.0, 1.0, 1.0, -2.0, 0.5};
  const double b[] = {0.0, -1.0, 0.1, 0.2};
  rl_model* m = nullptr;
  ASSERT_EQ(rl_model_mlp_create(2, widths, acts, w, b, &m), RL_OK);
  const double x[] = {1.0, 0.5};
  double z[2];
  ASSERT_EQ(rl_model_logits(m, x, 2, z, 2), RL_OK);
  EXPECT_DOUBLE_EQ(z[0], 1.1);
  EXPECT_DOUBLE_EQ(z[1], -0.55);
  rl_model* q = nullptr;
  ASSERT_EQ(rl_model_bitdepth_wrap(m, 8, 0, &q), RL_OK);
  EXPECT_EQ(rl_model_get_kind(q), RL_MODEL_BITDEPTH);
  EXPECT_EQ(rl_model_bitdepth_wrap(m, 12, 0, &q), RL_ERR_CONTRACT);
  rl_model_free(q);
  rl_model_free(m);
}

TEST(CApi, TablesFromOptimalCurves) {
  const double sigmas[] = {0.1};
  const double mus[] = {0.01, 0.1};
  rl_table* t = nullptr;
  ASSERT_EQ(rl_optimal_curve_table(sigmas, 1, mus, 2, &t), RL_OK);
  EXPECT_EQ(rl_table_rows(t), 2u);
  EXPECT_EQ(rl_table_cols(t), 3u);
  EXPECT_STREQ(rl_table_column_name(t, 2), "distance");
  double d = 0;
  ASSERT_EQ(rl_table_get_by_name(t, 0, "distance", &d), RL_OK);
  EXPECT_NEAR(d, 0.23263, 1e-5);
  EXPECT_EQ(rl_table_get(t, 5, 0, &d), RL_ERR_CONTRACT);
  char* csv = nullptr;
  ASSERT_EQ(rl_table_to_csv(t, &csv), RL_OK);
  EXPECT_EQ(std::string(csv).rfind("sigma,mu,distance\n", 0), 0u);
  rl_string_free(csv);
  rl_table_free(t);
}

TEST(CApi, TrainEvaluateAndNoiseLab) {
  rl_dataset* d = nullptr;
  ASSERT_EQ(rl_dataset_synth_blobs(2, 50, 4, 1.0, 0.2, 1, &d), RL_OK);
  EXPECT_EQ(rl_dataset_size(d), 100u);
  rl_train_config cfg = rl_train_config_default();
  cfg.epochs = 5;
  cfg.batch_size = 16;
  rl_model* m = nullptr;
  char* report = nullptr;
  ASSERT_EQ(rl_train(d, nullptr, 0, &cfg, &m, &report), RL_OK);
  EXPECT_NE(std::string(report).find("\"final\""), std::string::npos);
  rl_string_free(report);
  double acc = 0;
  ASSERT_EQ(rl_evaluate(m, d, 0.0, 1, 0, 0, &acc), RL_OK);
  EXPECT_GE(acc, 0.95);

  std::vector<double> x(4);
  int label = 0;
  ASSERT_EQ(rl_dataset_get(d, 0, x.data(), &label), RL_OK);
  rl_noise_estimate est{};
  ASSERT_EQ(rl_estimate_error_rate(m, x.data(), 4, label, 0.1, 1000, 3, 0, &est), RL_OK);
  EXPECT_EQ(est.n_samples, 1000);
  EXPECT_LE(est.ci_low, est.mu_hat);
  rl_boundary_estimate be{};
  const rl_search_config sc = rl_search_config_default();
  ASSERT_EQ(rl_nearest_error(m, x.data(), 4, label, &sc, nullptr, &be), RL_OK);
  EXPECT_GT(be.distance, 0.0);
  rl_model_free(m);
  rl_dataset_free(d);
}

TEST(CApi, CollinearSliceIsDegenerate) {
  const double w[] = {1.0, 0.0, 0.0, 1.0};
  const double b[] = {0.0, 0.0};
  rl_model* m = nullptr;
  ASSERT_EQ(rl_model_linear_create(2, 2, w, b, &m), RL_OK);
  const double a[] = {0.0, 0.0}, p1[] = {1.0, 1.0}, p2[] = {2.0, 2.0};
  const rl_slice_spec spec{1.0, 21, 0.0, 0.0};
  rl_raster* r = nullptr;
  EXPECT_EQ(rl_slice_rasterize(m, a, p1, p2, 2, &spec, &r), RL_ERR_DEGENERATE);
  EXPECT_EQ(r, nullptr);
  const double p3[] = {-1.0, 1.0};
  ASSERT_EQ(rl_slice_rasterize(m, a, p1, p3, 2, &spec, &r), RL_OK);
  EXPECT_EQ(rl_raster_resolution(r), 21);
  EXPECT_EQ(rl_raster_class(r, 100, 0), -1);
  rl_raster_free(r);
  rl_model_free(m);
}

TEST(CApi, CorruptionsThroughHandles) {
  rl_severity* s = nullptr;
  ASSERT_EQ(rl_severity_load(nullptr, &s), RL_OK);
  std::vector<double> x(16, 0.5), y(16);
  ASSERT_EQ(rl_apply_corruption(x.data(), 16, "pixelate", 3, 0.0, s, nullptr, 1, y.data()), RL_OK);
  EXPECT_EQ(y, x);
  EXPECT_EQ(rl_apply_corruption(x.data(), 16, "fog", 1, 0.0, s, nullptr, 1, y.data()), RL_ERR_CONTRACT);
  ASSERT_EQ(rl_apply_corruption(x.data(), 16, "brightness", 0, 0.25, s, nullptr, 1, y.data()), RL_OK);
  EXPECT_EQ(y[0], 0.75);
  rl_severity_free(s);
}

}  // namespace
