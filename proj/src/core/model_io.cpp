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

#include "core/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "core/errors.hpp"

namespace robustlab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; add byte swapping for this target");

constexpr char kMagic[4] = {'I', 'S', 'R', 'B'};
constexpr int kMaxNesting = 4;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  void matrix(const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }
  void vector(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  void raw(void* out, std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(std::string("truncated model file while reading ") + what, pos_);
    }
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8(const char* what) {
    std::uint8_t v;
    raw(&v, 1, what);
    return v;
  }
  std::uint32_t u32(const char* what) {
    std::uint32_t v;
    raw(&v, sizeof v, what);
    return v;
  }
  double f64(const char* what) {
    double v;
    raw(&v, sizeof v, what);
    return v;
  }
  std::uint32_t dim(const char* what) {
    const std::size_t at = pos_;
    const std::uint32_t v = u32(what);
    if (v == 0 || v > (1u << 24)) {
      throw ParseError(std::string("implausible ") + what + " " + std::to_string(v), at);
    }
    return v;
  }
  Matrix matrix(std::uint32_t rows, std::uint32_t cols) {
    const std::size_t need = std::size_t{rows} * cols * sizeof(double);
    if (bytes_.size() - pos_ < need) throw ParseError("truncated model file in weight matrix", pos_);
    Matrix m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = f64("weights");
    return m;
  }
  Vector vector(std::uint32_t n) {
    Vector v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = f64("bias");
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_record(Writer& w, const Classifier& model) {
  w.u8(static_cast<std::uint8_t>(model.kind()));
  switch (model.kind()) {
    case ModelKind::kLinear: {
      const auto& m = dynamic_cast<const LinearModel&>(model);
      w.u32(static_cast<std::uint32_t>(m.weights().rows()));
      w.u32(static_cast<std::uint32_t>(m.weights().cols()));
      w.matrix(m.weights());
      w.vector(m.biases());
      break;
    }
    case ModelKind::kMlp: {
      const auto& m = dynamic_cast<const MlpModel&>(model);
      w.u32(static_cast<std::uint32_t>(m.layers().size()));
      for (const DenseLayer& l : m.layers()) {
        w.u32(static_cast<std::uint32_t>(l.weights.rows()));
        w.u32(static_cast<std::uint32_t>(l.weights.cols()));
        w.u8(static_cast<std::uint8_t>(l.activation));
        w.matrix(l.weights);
        w.vector(l.bias);
      }
      break;
    }
    case ModelKind::kBitdepth: {
      const auto& m = dynamic_cast<const BitdepthDefense&>(model);
      w.u8(static_cast<std::uint8_t>(m.bits()));
      w.u8(m.masked_gradient() ? 1 : 0);
      write_record(w, *m.base());
      break;
    }
  }
}

std::shared_ptr<const Classifier> read_record(Reader& r, int depth) {
  if (depth > kMaxNesting) throw ParseError("model records nested too deeply", r.offset());
  const std::size_t kind_at = r.offset();
  const std::uint8_t kind = r.u8("model kind");
  try {
    switch (kind) {
      case 0: {
        const std::uint32_t classes = r.dim("class count");
        const std::uint32_t dim = r.dim("input dimension");
        Matrix w = r.matrix(classes, dim);
        Vector b = r.vector(classes);
        return std::make_shared<LinearModel>(std::move(w), std::move(b));
      }
      case 1: {
        const std::uint32_t n_layers = r.dim("layer count");
        std::vector<DenseLayer> layers;
        for (std::uint32_t i = 0; i < n_layers; ++i) {
          const std::uint32_t out = r.dim("layer output width");
          const std::uint32_t in = r.dim("layer input width");
          const std::size_t act_at = r.offset();
          const std::uint8_t act = r.u8("activation");
          if (act > 1) throw ParseError("unknown activation tag " + std::to_string(act), act_at);
          DenseLayer l;
          l.weights = r.matrix(out, in);
          l.bias = r.vector(out);
          l.activation = static_cast<Activation>(act);
          layers.push_back(std::move(l));
        }
        return std::make_shared<MlpModel>(std::move(layers));
      }
      case 2: {
        const std::uint8_t bits = r.u8("bit depth");
        const std::uint8_t masked = r.u8("gradient mode");
        auto base = read_record(r, depth + 1);
        return std::make_shared<BitdepthDefense>(std::move(base), bits, masked != 0);
      }
      default:
        throw ParseError("unknown model kind " + std::to_string(kind), kind_at);
    }
  } catch (const ContractError& e) {
    throw ParseError(std::string("invalid model record: ") + e.what(), kind_at);
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Classifier& model) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  write_record(w, model);
  return w.take();
}

std::shared_ptr<const Classifier> deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  r.raw(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ParseError("bad magic, not a model file", 0);
  }
  const std::uint32_t version = r.u32("format version");
  if (version != kModelFormatVersion) {
    throw VersionError("model format version " + std::to_string(version) +
                       " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  auto model = read_record(r, 0);
  if (!r.done()) throw ParseError("trailing bytes after model record", r.offset());
  return model;
}

void save_model(const Classifier& model, const std::string& path) {
  const auto bytes = serialize_model(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::shared_ptr<const Classifier> load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open model file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

std::string model_content_hash(const Classifier& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : serialize_model(model)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xf];
  return out;
}

}  // namespace robustlab
