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

#include "core/slices.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/table.hpp"

namespace robustlab {

namespace {

constexpr std::array<std::array<unsigned char, 3>, 10> kPalette = {{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {214, 39, 40},
    {148, 103, 189},
    {140, 86, 75},
    {227, 119, 194},
    {127, 127, 127},
    {188, 189, 34},
    {23, 190, 207},
}};

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

SliceFrame orthonormal_frame(const Vector& anchor, const Vector& p1, const Vector& p2) {
  if (anchor.size() != p1.size() || anchor.size() != p2.size()) {
    throw ContractError("slice points must share a dimension");
  }
  const Vector d1 = p1 - anchor;
  const Vector d2 = p2 - anchor;
  const double n1 = d1.norm();
  const double n2 = d2.norm();
  if (n1 == 0.0 || n2 == 0.0) {
    throw DegenerateError("degenerate slice: a marker coincides with the anchor");
  }
  SliceFrame f;
  f.origin = anchor;
  f.u = d1 / n1;
  Vector w = d2 - f.u.dot(d2) * f.u;
  w -= f.u.dot(w) * f.u;
  const double cos_angle = std::clamp(f.u.dot(d2) / n2, -1.0, 1.0);
  if (w.norm() <= 1e-9 * n2) {
    const double degrees = std::acos(cos_angle) * 180.0 / std::numbers::pi;
    throw DegenerateError("degenerate slice: p1 and p2 directions are collinear (angle " +
                          std::to_string(degrees) + " degrees)");
  }
  f.v = w.normalized();
  return f;
}

void SliceSpec::validate() const {
  if (!(half_extent > 0.0)) throw ContractError("slice half_extent must be positive");
  if (resolution < 3 || resolution % 2 == 0) throw ContractError("slice resolution must be odd and >= 3");
  if (circle_radius && !(*circle_radius > 0.0)) throw ContractError("circle radius must be positive");
  if (linf_radius && !(*linf_radius > 0.0)) throw ContractError("L-infinity radius must be positive");
}

GridPoint SliceRaster::snap(double a, double b) const {
  const double col = (a + half_extent) / pixel_size();
  const double row = (half_extent - b) / pixel_size();
  GridPoint g;
  g.col = static_cast<int>(std::lround(col));
  g.row = static_cast<int>(std::lround(row));
  g.inside = g.col >= 0 && g.col < resolution && g.row >= 0 && g.row < resolution;
  return g;
}

SliceRaster rasterize(const Classifier& model, const SliceSpec& spec) {
  spec.validate();
  SliceRaster r;
  r.frame = orthonormal_frame(spec.anchor, spec.p1, spec.p2);
  r.resolution = spec.resolution;
  r.half_extent = spec.half_extent;
  const auto cells = static_cast<std::size_t>(spec.resolution) * spec.resolution;
  r.class_grid.assign(cells, 0);
  r.confidence_grid.assign(cells, 0.0);
  parallel_for(static_cast<std::size_t>(spec.resolution), [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < spec.resolution; ++j) {
      const Vector x = r.frame.origin + r.a_of(j) * r.frame.u + r.b_of(i) * r.frame.v;
      const Vector z = model.logits(x);
      const int cls = argmax_lowest(z);
      const std::size_t k = row * spec.resolution + j;
      r.class_grid[k] = cls;
      r.confidence_grid[k] = softmax(z)[cls];
    }
  });
  const int center = spec.resolution / 2;
  // The center pixel is the anchor itself (a = b = 0 up to rounding); store
  // the exact prediction there.
  r.anchor_class = model.predict(spec.anchor);
  r.class_grid[static_cast<std::size_t>(center * spec.resolution + center)] = r.anchor_class;
  r.confidence_grid[static_cast<std::size_t>(center * spec.resolution + center)] =
      softmax(model.logits(spec.anchor))[r.anchor_class];

  const Vector d1 = spec.p1 - spec.anchor;
  const Vector d2 = spec.p2 - spec.anchor;
  r.p1_a = r.frame.u.dot(d1);
  r.p1_b = r.frame.v.dot(d1);
  r.p2_a = r.frame.u.dot(d2);
  r.p2_b = r.frame.v.dot(d2);
  r.p1_pixel = r.snap(r.p1_a, r.p1_b);
  r.p2_pixel = r.snap(r.p2_a, r.p2_b);
  r.p1_class = model.predict(spec.p1);
  r.p2_class = model.predict(spec.p2);
  return r;
}

std::string raster_csv(const SliceRaster& raster) {
  Table t({"i", "j", "class", "confidence"});
  for (int i = 0; i < raster.resolution; ++i) {
    for (int j = 0; j < raster.resolution; ++j) {
      t.add_row({std::int64_t{i}, std::int64_t{j}, std::int64_t{raster.class_at(i, j)},
                 raster.confidence_at(i, j)});
    }
  }
  return t.to_csv();
}

bool on_circle(const SliceRaster& raster, int row, int col, double radius) {
  const double dist = std::hypot(raster.a_of(col), raster.b_of(row));
  return std::abs(dist - radius) <= 0.5 * raster.pixel_size();
}

bool inside_linf(const SliceRaster& raster, int row, int col, double radius) {
  const Vector offset = raster.a_of(col) * raster.frame.u + raster.b_of(row) * raster.frame.v;
  return offset.lpNorm<Eigen::Infinity>() <= radius;
}

std::vector<unsigned char> raster_ppm(const SliceRaster& raster, const SliceSpec& spec) {
  const int res = raster.resolution;
  const std::string header = "P6\n" + std::to_string(res) + " " + std::to_string(res) + "\n255\n";
  std::vector<unsigned char> img(header.begin(), header.end());
  const std::size_t base = img.size();
  img.resize(base + static_cast<std::size_t>(res) * res * 3);
  auto put = [&](int row, int col, std::array<unsigned char, 3> rgb) {
    if (row < 0 || col < 0 || row >= res || col >= res) return;
    const std::size_t k = base + (static_cast<std::size_t>(row) * res + col) * 3;
    img[k] = rgb[0];
    img[k + 1] = rgb[1];
    img[k + 2] = rgb[2];
  };

  std::vector<char> linf;
  if (spec.linf_radius) {
    linf.resize(static_cast<std::size_t>(res) * res);
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j)
        linf[static_cast<std::size_t>(i * res + j)] = inside_linf(raster, i, j, *spec.linf_radius);
  }
  auto in_linf = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < res && j < res && linf[static_cast<std::size_t>(i * res + j)];
  };

  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const auto& color = kPalette[static_cast<std::size_t>(raster.class_at(i, j)) % kPalette.size()];
      const double brightness = std::clamp(raster.confidence_at(i, j), 0.3, 1.0);
      std::array<unsigned char, 3> rgb;
      for (int c = 0; c < 3; ++c) {
        rgb[static_cast<std::size_t>(c)] =
            static_cast<unsigned char>(std::lround(color[static_cast<std::size_t>(c)] * brightness));
      }
      if (spec.linf_radius && in_linf(i, j) &&
          (!in_linf(i - 1, j) || !in_linf(i + 1, j) || !in_linf(i, j - 1) || !in_linf(i, j + 1))) {
        rgb = {255, 255, 255};
      }
      if (spec.circle_radius && on_circle(raster, i, j, *spec.circle_radius)) rgb = {0, 0, 0};
      put(i, j, rgb);
    }
  }
  auto marker = [&](int row, int col, std::array<unsigned char, 3> rgb) {
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) put(row + di, col + dj, rgb);
  };
  const int center = res / 2;
  marker(center, center, {0, 0, 0});
  if (raster.p1_pixel.inside) marker(raster.p1_pixel.row, raster.p1_pixel.col, {0, 0, 255});
  if (raster.p2_pixel.inside) marker(raster.p2_pixel.row, raster.p2_pixel.col, {255, 0, 0});
  return img;
}

std::string raster_json(const SliceRaster& raster, const SliceSpec& spec) {
  nlohmann::ordered_json j;
  j["resolution"] = spec.resolution;
  j["half_extent"] = spec.half_extent;
  j["pixel_size"] = raster.pixel_size();
  j["circle_radius"] = spec.circle_radius ? nlohmann::ordered_json(*spec.circle_radius) : nullptr;
  j["linf_radius"] = spec.linf_radius ? nlohmann::ordered_json(*spec.linf_radius) : nullptr;
  j["frame"] = {{"origin", to_std(raster.frame.origin)},
                {"u", to_std(raster.frame.u)},
                {"v", to_std(raster.frame.v)}};
  auto marker = [](double a, double b, const GridPoint& g, int cls) {
    return nlohmann::ordered_json{{"a", a}, {"b", b}, {"row", g.row}, {"col", g.col},
                                  {"inside", g.inside}, {"class", cls}};
  };
  const int c = spec.resolution / 2;
  j["anchor"] = {{"row", c}, {"col", c}, {"class", raster.anchor_class}};
  j["p1"] = marker(raster.p1_a, raster.p1_b, raster.p1_pixel, raster.p1_class);
  j["p2"] = marker(raster.p2_a, raster.p2_b, raster.p2_pixel, raster.p2_class);
  return j.dump(2) + "\n";
}

void export_raster(const SliceRaster& raster, const SliceSpec& spec, const std::string& path_prefix) {
  const std::vector<unsigned char> ppm = raster_ppm(raster, spec);
  write_text_file(path_prefix + ".ppm", std::string(ppm.begin(), ppm.end()));
  write_text_file(path_prefix + ".csv", raster_csv(raster));
  write_text_file(path_prefix + ".json", raster_json(raster, spec));
}

}  // namespace robustlab
