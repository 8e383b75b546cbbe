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

#include "core/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/table.hpp"

namespace robustlab {

void Dataset::validate() const {
  if (inputs.size() != labels.size()) {
    throw ContractError("dataset has " + std::to_string(inputs.size()) + " inputs but " +
                        std::to_string(labels.size()) + " labels");
  }
  if (num_classes < 2) throw ContractError("dataset needs at least 2 classes");
  const int n = dim();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != n) throw ContractError("dataset row " + std::to_string(i) + " has a different dimension");
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw ContractError("dataset label " + std::to_string(labels[i]) + " at row " +
                          std::to_string(i) + " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

Dataset Dataset::slice(std::size_t begin, std::size_t end, Split tag) const {
  if (begin > end || end > size()) throw ContractError("dataset slice out of range");
  Dataset out;
  out.inputs.assign(inputs.begin() + begin, inputs.begin() + end);
  out.labels.assign(labels.begin() + begin, labels.begin() + end);
  out.num_classes = num_classes;
  out.split = tag;
  return out;
}

namespace {

std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at, const char* file) {
  if (b.size() < at + 4) throw ParseError(std::string("truncated IDX ") + file + " header", b.size());
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

}  // namespace

Dataset parse_idx(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels) {
  if (be32(images, 0, "images") != 0x00000803u) throw ParseError("bad IDX image magic", 0);
  if (be32(labels, 0, "labels") != 0x00000801u) throw ParseError("bad IDX label magic", 0);
  const std::uint32_t count = be32(images, 4, "images");
  const std::uint32_t rows = be32(images, 8, "images");
  const std::uint32_t cols = be32(images, 12, "images");
  const std::uint32_t n_labels = be32(labels, 4, "labels");
  if (count != n_labels) {
    throw ContractError("IDX image/label count mismatch: " + std::to_string(count) + " images, " +
                        std::to_string(n_labels) + " labels");
  }
  const std::size_t pixels = std::size_t{rows} * cols;
  if (pixels == 0) throw ParseError("IDX images have zero pixels", 8);
  const std::size_t need = 16 + pixels * count;
  if (images.size() < need) throw ParseError("truncated IDX image data", images.size());
  if (labels.size() < 8 + std::size_t{count}) throw ParseError("truncated IDX label data", labels.size());

  Dataset d;
  d.inputs.reserve(count);
  d.labels.reserve(count);
  int max_label = 1;
  for (std::uint32_t i = 0; i < count; ++i) {
    Vector x(static_cast<Eigen::Index>(pixels));
    const std::uint8_t* p = images.data() + 16 + pixels * i;
    for (std::size_t k = 0; k < pixels; ++k) x[static_cast<Eigen::Index>(k)] = p[k] / 255.0;
    d.inputs.push_back(std::move(x));
    const int label = labels[8 + i];
    max_label = std::max(max_label, label);
    d.labels.push_back(label);
  }
  d.num_classes = max_label + 1;
  return d;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  return parse_idx(read_all(images_path), read_all(labels_path));
}

Dataset load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(f, line)) throw ParseError("empty dataset CSV", 0);
  if (line.rfind("label", 0) != 0) throw ParseError("dataset CSV header must start with 'label'", 0);
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  offset += line.size() + 1;
  Dataset d;
  int max_label = 1;
  while (std::getline(f, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    std::vector<double> values;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0;
      auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc() || ptr != comma) {
        throw ParseError("bad number in dataset CSV", offset + static_cast<std::size_t>(p - line.data()));
      }
      values.push_back(v);
      p = comma + 1;
    }
    if (values.size() < 2) throw ParseError("dataset CSV row needs a label and features", offset);
    if (values.size() != columns) {
      throw ParseError("dataset CSV row has " + std::to_string(values.size()) + " fields, header has " +
                           std::to_string(columns),
                       offset);
    }
    const int label = static_cast<int>(values[0]);
    if (label < 0 || label != values[0]) throw ParseError("dataset CSV label must be a non-negative integer", offset);
    max_label = std::max(max_label, label);
    d.labels.push_back(label);
    d.inputs.push_back(Eigen::Map<Vector>(values.data() + 1, static_cast<Eigen::Index>(values.size() - 1)));
    offset += line.size() + 1;
  }
  d.num_classes = max_label + 1;
  d.validate();
  return d;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::string out = "label";
  for (int i = 0; i < data.dim(); ++i) out += ",x" + std::to_string(i);
  out += '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    out += std::to_string(data.labels[r]);
    for (Eigen::Index i = 0; i < data.inputs[r].size(); ++i) {
      out += ',';
      out += format_real(data.inputs[r][i]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

Dataset synth_blobs(int n_classes, int n_per_class, int dim, double centers_scale, double sigma,
                    std::uint64_t seed) {
  if (n_classes < 2 || n_per_class < 1 || dim < 1) {
    throw ContractError("synth_blobs needs n_classes >= 2, n_per_class >= 1, dim >= 1");
  }
  if (!(sigma >= 0.0)) throw ContractError("synth_blobs sigma must be >= 0");
  std::vector<Vector> centers;
  for (int c = 0; c < n_classes; ++c) {
    Vector u = Vector::Zero(dim);
    if (dim >= n_classes) {
      for (int i = c; i < dim; i += n_classes) u[i] = 1.0;
    } else {
      u[c % dim] = 1.0;
    }
    centers.push_back(centers_scale * u / u.norm());
  }
  Dataset d;
  d.num_classes = n_classes;
  for (int k = 0; k < n_per_class; ++k) {
    for (int c = 0; c < n_classes; ++c) {
      RngStream rng(seed, "synth-blobs", {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(c)});
      Vector x = centers[c];
      if (sigma > 0.0) {
        for (int i = 0; i < dim; ++i) x[i] += sigma * rng.normal();
      }
      d.inputs.push_back(std::move(x));
      d.labels.push_back(c);
    }
  }
  return d;
}

Dataset synth_desk(const DeskSpec& spec) {
  if (spec.n_classes < 2 || spec.n_per_class < 1 || spec.robust_dims < 0 || spec.fragile_dims < 0 ||
      spec.robust_dims + spec.fragile_dims < 1) {
    throw ContractError("synth_desk: invalid sizes");
  }
  const int dim = spec.robust_dims + spec.fragile_dims;
  Matrix codes(spec.n_classes, dim);
  RngStream code_rng(spec.seed, "desk-codes");
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int i = 0; i < dim; ++i) {
      if (spec.n_classes == 2) {
        codes(c, i) = c == 0 ? -1.0 : 1.0;
      } else {
        codes(c, i) = code_rng.bernoulli(0.5) ? 1.0 : -1.0;
      }
    }
  }
  Dataset d;
  d.num_classes = spec.n_classes;
  for (int k = 0; k < spec.n_per_class; ++k) {
    for (int c = 0; c < spec.n_classes; ++c) {
      RngStream rng(spec.seed, "desk-sample", {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(c)});
      Vector x(dim);
      for (int i = 0; i < dim; ++i) {
        const bool robust = i < spec.robust_dims;
        const double sep = robust ? spec.robust_separation : spec.fragile_separation;
        const double spread = robust ? spec.robust_spread : spec.fragile_spread;
        x[i] = spec.base + 0.5 * sep * codes(c, i) + spread * rng.normal();
      }
      d.inputs.push_back(std::move(x));
      d.labels.push_back(c);
    }
  }
  return d;
}

}  // namespace robustlab
