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

#include <optional>
#include <string>
#include <vector>

#include "core/models.hpp"

// Two-dimensional slices of input space through three points: a clean
// anchor and two errors (one from noise, one from an attack).
namespace robustlab {

struct SliceFrame {
  Vector origin;  // the anchor
  Vector u;       // unit vector toward p1
  Vector v;       // unit vector in the plane, orthogonal to u
};

// Gram-Schmidt on (p1 - anchor, p2 - anchor). Throws DegenerateError when
// the two directions are (numerically) collinear; the message includes the
// angle between them.
SliceFrame orthonormal_frame(const Vector& anchor, const Vector& p1, const Vector& p2);

struct SliceSpec {
  Vector anchor;
  Vector p1;
  Vector p2;
  double half_extent = 1.0;  // plot radius in input L2 units
  int resolution = 201;      // odd, so the anchor is the center pixel
  std::optional<double> circle_radius;  // typically σ√n
  std::optional<double> linf_radius;

  void validate() const;
};

struct GridPoint {
  int row;
  int col;
  bool inside;  // false when the point falls outside the raster
};

struct SliceRaster {
  int resolution = 0;
  double half_extent = 0.0;
  std::vector<int> class_grid;          // row-major, resolution^2
  std::vector<double> confidence_grid;  // softmax probability of the predicted class
  SliceFrame frame;
  // In-plane coordinates (a, b) of p1 and p2 and their snapped pixels.
  double p1_a = 0, p1_b = 0, p2_a = 0, p2_b = 0;
  GridPoint p1_pixel{}, p2_pixel{};
  int anchor_class = 0;
  int p1_class = 0;  // prediction at the exact marker points
  int p2_class = 0;

  int class_at(int row, int col) const { return class_grid[static_cast<std::size_t>(row * resolution + col)]; }
  double confidence_at(int row, int col) const {
    return confidence_grid[static_cast<std::size_t>(row * resolution + col)];
  }
  double pixel_size() const { return 2.0 * half_extent / (resolution - 1); }
  // Slice coordinates of a pixel: column -> a (along u), row -> b (along v,
  // top row is +half_extent).
  double a_of(int col) const { return -half_extent + pixel_size() * col; }
  double b_of(int row) const { return half_extent - pixel_size() * row; }
  GridPoint snap(double a, double b) const;
};

// Evaluates the model at anchor + a·u + b·v for every pixel.
SliceRaster rasterize(const Classifier& model, const SliceSpec& spec);

// Writes <prefix>.ppm (P6, class palette, confidence as brightness, circle
// and L∞ cross-section overlays, markers), <prefix>.csv (i,j,class,confidence)
// and <prefix>.json (spec, frame, marker pixels).
void export_raster(const SliceRaster& raster, const SliceSpec& spec, const std::string& path_prefix);

// Pieces of export_raster, exposed for tests.
std::string raster_csv(const SliceRaster& raster);
std::vector<unsigned char> raster_ppm(const SliceRaster& raster, const SliceSpec& spec);
std::string raster_json(const SliceRaster& raster, const SliceSpec& spec);

// True for pixels drawn as the circle overlay: |grid distance - r| <= pixel/2.
bool on_circle(const SliceRaster& raster, int row, int col, double radius);
// Membership of a pixel's point in the slice of the L∞ ball of radius r.
bool inside_linf(const SliceRaster& raster, int row, int col, double radius);

}  // namespace robustlab
