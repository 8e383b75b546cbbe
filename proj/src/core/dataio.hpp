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
#include <string>
#include <vector>

#include "core/types.hpp"

namespace robustlab {

enum class Split { kTrain, kTest };

struct Dataset {
  std::vector<Vector> inputs;
  std::vector<int> labels;
  int num_classes = 2;
  Split split = Split::kTrain;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
  int dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }

  // Equal lengths, consistent dimension, labels in [0, num_classes).
  void validate() const;
  // Rows [begin, end) as a new dataset with the given split tag.
  Dataset slice(std::size_t begin, std::size_t end, Split tag) const;
};

// IDX (MNIST-style) images + labels. Magic 0x00000803 / 0x00000801, big-endian
// dimensions; pixel bytes are scaled by 1/255.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);
Dataset parse_idx(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels);

// CSV with header `label,x0,x1,...`.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

// Isotropic Gaussian blobs. Class c is centered at centers_scale * u_c with
// u_c the unit vector spread evenly over coordinates {i : i mod C == c}
// (u_c = e_{c mod dim} when dim < C). Samples are interleaved by class.
Dataset synth_blobs(int n_classes, int n_per_class, int dim, double centers_scale, double sigma,
                    std::uint64_t seed);

// Two-feature-group desk dataset, images in [0,1] around a gray level.
// "Robust" coordinates separate classes by a large offset with wide
// within-class spread; "fragile" coordinates separate them by a tiny offset
// with a tinier spread. Class codes are ±1 per coordinate (opposite for the
// binary case).
struct DeskSpec {
  int n_classes = 2;
  int n_per_class = 200;
  int robust_dims = 32;
  int fragile_dims = 32;
  double base = 0.5;
  double robust_separation = 0.2;
  double robust_spread = 0.2;
  double fragile_separation = 0.08;
  double fragile_spread = 0.008;
  std::uint64_t seed = 0;
};
Dataset synth_desk(const DeskSpec& spec);

}  // namespace robustlab
