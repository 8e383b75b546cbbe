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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/slices.hpp"
#include "test_support.hpp"

namespace robustlab {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TEST(Frame, OrthonormalAndSpansPoints) {
  RngStream rng(1, "frame");
  const Vector a = testing::random_vector(rng, 7);
  const Vector p1 = testing::random_vector(rng, 7);
  const Vector p2 = testing::random_vector(rng, 7);
  const SliceFrame f = orthonormal_frame(a, p1, p2);
  EXPECT_NEAR(f.u.norm(), 1.0, 1e-12);
  EXPECT_NEAR(f.v.norm(), 1.0, 1e-12);
  EXPECT_NEAR(f.u.dot(f.v), 0.0, 1e-12);
  const Vector r = p2 - a;
  EXPECT_NEAR((r - r.dot(f.u) * f.u - r.dot(f.v) * f.v).norm(), 0.0, 1e-10);
}

TEST(Frame, CollinearAndCoincidentAreDegenerate) {
  const Vector a = Vector::Zero(3);
  const Vector p1 = Vector::Unit(3, 0);
  EXPECT_THROW(orthonormal_frame(a, p1, 2.0 * p1), DegenerateError);
  EXPECT_THROW(orthonormal_frame(a, a, p1), DegenerateError);
  try {
    orthonormal_frame(a, p1, -3.0 * p1);
  } catch (const DegenerateError& e) {
    EXPECT_NE(std::string(e.what()).find("degree"), std::string::npos);
  }
}

TEST(Rasterize, CenterPixelIsAnchorAndMarkersSnap) {
  RngStream rng(2, "raster");
  const auto m = testing::random_mlp(rng, {5, 8, 3});
  SliceSpec s;
  s.anchor = testing::random_vector(rng, 5);
  s.p1 = s.anchor + 0.5 * Vector::Unit(5, 0);
  s.p2 = s.anchor + 0.5 * Vector::Unit(5, 1);
  s.half_extent = 1.0;
  s.resolution = 41;
  const SliceRaster r = rasterize(*m, s);
  EXPECT_EQ(r.class_at(20, 20), m->predict(s.anchor));
  EXPECT_EQ(r.p1_pixel.row, 20);
  EXPECT_EQ(r.p1_pixel.col, 30);
  EXPECT_EQ(r.p2_pixel.row, 10);
  EXPECT_EQ(r.p2_pixel.col, 20);
  s.resolution = 40;
  EXPECT_THROW(rasterize(*m, s), ContractError);
}

TEST(Rasterize, LinearBoundaryIsStraightLine) {
  Matrix w = Matrix::Zero(2, 3);
  w(1, 0) = 1.0;
  w(1, 1) = 1.0;
  Vector b(2);
  b << 0.0, -0.5;  // class 1 where x0 + x1 > 0.5
  const LinearModel m(w, b);
  SliceSpec s;
  s.anchor = Vector::Zero(3);
  s.p1 = Vector::Unit(3, 0);
  s.p2 = Vector::Unit(3, 1);
  s.half_extent = 1.0;
  s.resolution = 101;
  const SliceRaster r = rasterize(m, s);
  for (int row = 0; row < r.resolution; ++row) {
    for (int col = 0; col < r.resolution; ++col) {
      const double a = r.a_of(col), bb = r.b_of(row);
      if (std::abs(a + bb - 0.5) < 1e-9) continue;
      EXPECT_EQ(r.class_at(row, col), a + bb > 0.5 ? 1 : 0) << row << "," << col;
    }
  }
}

TEST(Export, ByteIdenticalAndWellFormed) {
  RngStream rng(3, "export");
  const auto m = testing::random_mlp(rng, {4, 6, 2});
  SliceSpec s;
  s.anchor = testing::random_vector(rng, 4);
  s.p1 = testing::random_vector(rng, 4);
  s.p2 = testing::random_vector(rng, 4);
  s.half_extent = 2.0;
  s.resolution = 31;
  s.circle_radius = 0.5;
  s.linf_radius = 0.2;
  const auto dir = std::filesystem::temp_directory_path();
  export_raster(rasterize(*m, s), s, (dir / "rl_slice_a").string());
  export_raster(rasterize(*m, s), s, (dir / "rl_slice_b").string());
  for (const char* ext : {".ppm", ".csv", ".json"}) {
    EXPECT_EQ(read_file(dir / (std::string("rl_slice_a") + ext)),
              read_file(dir / (std::string("rl_slice_b") + ext)));
  }
  const std::string ppm = read_file(dir / "rl_slice_a.ppm");
  EXPECT_EQ(ppm.rfind("P6\n31 31\n255\n", 0), 0u);
  EXPECT_EQ(ppm.size(), std::string("P6\n31 31\n255\n").size() + 31u * 31u * 3u);
  const std::string csv = read_file(dir / "rl_slice_a.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 31 * 31 + 1);
}

TEST(Overlays, CircleAndLinfMembership) {
  const LinearModel m(Matrix::Identity(2, 2), Vector::Zero(2));
  SliceSpec s;
  s.anchor = Vector::Zero(2);
  s.p1 = Vector::Unit(2, 0);
  s.p2 = Vector::Unit(2, 1);
  s.half_extent = 1.0;
  s.resolution = 21;
  const SliceRaster r = rasterize(m, s);
  EXPECT_TRUE(on_circle(r, 10, 15, 0.5));
  EXPECT_FALSE(on_circle(r, 10, 10, 0.5));
  EXPECT_TRUE(inside_linf(r, 10, 10, 0.3));
  EXPECT_TRUE(inside_linf(r, 7, 7, 0.3));
  EXPECT_FALSE(inside_linf(r, 5, 10, 0.3));
}

}  // namespace
}  // namespace robustlab
