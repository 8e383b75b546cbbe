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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/models.hpp"

namespace robustlab {

// Binary model file, all integers and floats little-endian:
//   "ISRB"  u32 version  then a model record
// model record:
//   u8 kind
//   kind 0 (linear):   u32 classes, u32 dim, f64 weights[classes*dim] (row-major), f64 bias[classes]
//   kind 1 (mlp):      u32 layers, per layer: u32 out, u32 in, u8 activation,
//                      f64 weights[out*in] (row-major), f64 bias[out]
//   kind 2 (bitdepth): u8 bits, u8 masked_gradient, nested model record
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const Classifier& model);
std::shared_ptr<const Classifier> deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const Classifier& model, const std::string& path);
std::shared_ptr<const Classifier> load_model(const std::string& path);

// FNV-1a 64 of the serialized bytes as 16 hex digits; used in run manifests.
std::string model_content_hash(const Classifier& model);

}  // namespace robustlab
