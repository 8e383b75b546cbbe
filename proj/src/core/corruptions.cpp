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

#include "core/corruptions.hpp"

#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace robustlab {

namespace {

constexpr std::array<std::string_view, 8> kNames = {
    "gaussian_noise", "shot_noise", "impulse_noise", "pepper_noise",
    "contrast",       "brightness", "pixelate",      "pca_noise"};

// Calibrated for the 8x8 desk dataset; see config/severity_v1.cfg.
constexpr std::string_view kDefaultTable =
    "version=1\n"
    "gaussian_noise=0.08,0.16,0.24,0.32,0.4\n"
    "shot_noise=80,20,9,5,3\n"
    "impulse_noise=0.02,0.05,0.1,0.15,0.25\n"
    "pepper_noise=0.05,0.1,0.2,0.3,0.4\n"
    "contrast=0.6,0.45,0.3,0.2,0.1\n"
    "brightness=0.05,0.1,0.15,0.2,0.3\n"
    "pixelate=2,2,4,4,8\n"
    "pca_noise=0.08,0.16,0.24,0.32,0.4\n";

// Inversion from one uniform per draw keeps streams aligned across severity levels.
using PoissonInv = boost::math::poisson_distribution<
    double, boost::math::policies::policy<
                boost::math::policies::discrete_quantile<boost::math::policies::integer_round_up>>>;

Vector clip01(Vector x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::string_view corruption_name(CorruptionKind kind) { return kNames[static_cast<int>(kind)]; }

CorruptionKind corruption_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<CorruptionKind>(i);
  }
  throw ContractError("unknown corruption '" + std::string(name) + "'");
}

bool is_noise_corruption(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kGaussianNoise:
    case CorruptionKind::kShotNoise:
    case CorruptionKind::kImpulseNoise:
    case CorruptionKind::kPepperNoise:
    case CorruptionKind::kPcaNoise:
      return true;
    default:
      return false;
  }
}

Vector apply_corruption(const Vector& x, const Corruption& c, RngStream& rng,
                        const PcaBasis* basis) {
  const Eigen::Index n = x.size();
  switch (c.kind) {
    case CorruptionKind::kGaussianNoise: {
      if (!(c.param >= 0.0)) throw ContractError("gaussian_noise sigma must be >= 0");
      Vector y = x;
      for (Eigen::Index i = 0; i < n; ++i) y[i] += c.param * rng.normal();
      return y;
    }
    case CorruptionKind::kShotNoise: {
      if (!(c.param > 0.0)) throw ContractError("shot_noise photon scale must be positive");
      Vector y(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = std::max(0.0, x[i]) * c.param;
        if (lambda == 0.0) {
          y[i] = 0.0;
          continue;
        }
        y[i] = boost::math::quantile(PoissonInv(lambda), rng.uniform()) / c.param;
      }
      return clip01(y);
    }
    case CorruptionKind::kImpulseNoise: {
      if (!(c.param >= 0.0 && c.param <= 1.0)) throw ContractError("impulse fraction must be in [0, 1]");
      Vector y = x;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool hit = rng.bernoulli(c.param);
        const bool salt = rng.bernoulli(0.5);
        if (hit) y[i] = salt ? 1.0 : 0.0;
      }
      return clip01(y);
    }
    case CorruptionKind::kPepperNoise: {
      if (!(c.param >= 0.0 && c.param <= 1.0)) throw ContractError("pepper p must be in [0, 1]");
      Vector y = x;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (rng.bernoulli(c.param)) y[i] = 0.0;
      }
      return clip01(y);
    }
    case CorruptionKind::kContrast: {
      const double mean = x.mean();
      return clip01(((x.array() - mean) * c.param + mean).matrix());
    }
    case CorruptionKind::kBrightness:
      return clip01((x.array() + c.param).matrix());
    case CorruptionKind::kPixelate: {
      const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n) {
        throw ContractError("pixelate needs a square image, got " + std::to_string(n) + " values");
      }
      const auto block = static_cast<Eigen::Index>(std::llround(c.param));
      if (block < 1 || static_cast<double>(block) != c.param || side % block != 0) {
        throw ContractError("pixelate block " + std::to_string(c.param) +
                            " does not divide the image side " + std::to_string(side));
      }
      Vector y(n);
      for (Eigen::Index br = 0; br < side; br += block) {
        for (Eigen::Index bc = 0; bc < side; bc += block) {
          double sum = 0.0;
          for (Eigen::Index r = br; r < br + block; ++r)
            for (Eigen::Index col = bc; col < bc + block; ++col) sum += x[r * side + col];
          const double avg = sum / static_cast<double>(block * block);
          for (Eigen::Index r = br; r < br + block; ++r)
            for (Eigen::Index col = bc; col < bc + block; ++col) y[r * side + col] = avg;
        }
      }
      return clip01(y);
    }
    case CorruptionKind::kPcaNoise: {
      if (!basis) throw ContractError("pca_noise needs a fitted PCA basis");
      if (basis->components.cols() != n) throw ContractError("PCA basis dimension mismatch");
      Vector coeff(basis->k());
      for (int i = 0; i < basis->k(); ++i) coeff[i] = c.param * rng.normal();
      return x + basis->components.transpose() * coeff;
    }
  }
  throw ContractError("unhandled corruption kind");
}

SeverityTable SeverityTable::defaults() { return parse(std::string(kDefaultTable)); }

SeverityTable SeverityTable::parse(const std::string& text) {
  SeverityTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t offset = 0;
  bool have_version = false;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("severity config line without '='", line_offset);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "version") {
      if (value != "1") throw VersionError("severity config version " + value + " is not supported");
      have_version = true;
      continue;
    }
    CorruptionKind kind{};
    try {
      kind = corruption_from_name(key);
    } catch (const ContractError& e) {
      throw ParseError(e.what(), line_offset);
    }
    std::array<double, 5> levels{};
    std::size_t count = 0;
    std::istringstream vs(value);
    std::string item;
    while (std::getline(vs, item, ',')) {
      item = trim(item);
      if (count >= 5) throw ParseError("severity config '" + key + "' has more than 5 levels", line_offset);
      double v = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw ParseError("bad number '" + item + "' in severity config", line_offset);
      }
      levels[count++] = v;
    }
    if (count != 5) throw ParseError("severity config '" + key + "' needs exactly 5 levels", line_offset);
    t.params_[kind] = levels;
  }
  if (!have_version) throw ParseError("severity config has no version line", 0);
  return t;
}

SeverityTable SeverityTable::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open severity config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

double SeverityTable::parameter(CorruptionKind kind, int severity) const {
  if (severity < 1 || severity > 5) {
    throw ContractError("severity must be in 1..5, got " + std::to_string(severity));
  }
  const auto it = params_.find(kind);
  if (it == params_.end()) {
    throw ContractError("no severity levels configured for " + std::string(corruption_name(kind)));
  }
  return it->second[static_cast<std::size_t>(severity - 1)];
}

std::string SeverityTable::to_text() const {
  std::string out = "version=1\n";
  for (const auto& [kind, levels] : params_) {
    out += corruption_name(kind);
    out += '=';
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (i) out += ',';
      out += format_real(levels[i]);
    }
    out += '\n';
  }
  return out;
}

PcaBasis fit_pca(const Dataset& data, int k, std::uint64_t seed) {
  data.validate();
  const int n = data.dim();
  if (k < 1 || k > n) throw ContractError("fit_pca: k must be in [1, " + std::to_string(n) + "]");
  if (static_cast<int>(data.size()) <= k) throw ContractError("fit_pca: need more samples than components");

  const auto m = static_cast<Eigen::Index>(data.size());
  Matrix centered(m, n);
  Vector mean = Vector::Zero(n);
  for (const Vector& x : data.inputs) mean += x;
  mean /= static_cast<double>(m);
  for (Eigen::Index i = 0; i < m; ++i) centered.row(i) = (data.inputs[static_cast<std::size_t>(i)] - mean).transpose();
  Matrix cov = centered.transpose() * centered / static_cast<double>(m - 1);

  constexpr int kIterations = 200;
  constexpr double kTolerance = 1e-10;
  PcaBasis basis;
  basis.mean = mean;
  basis.components.resize(k, n);
  basis.explained_variance.resize(k);
  Matrix deflated = cov;

  auto orthogonalize = [&](Vector& v, int upto) {
    for (int j = 0; j < upto; ++j) v -= basis.components.row(j).dot(v) * basis.components.row(j).transpose();
  };

  for (int c = 0; c < k; ++c) {
    RngStream rng(seed, "pca-start", {static_cast<std::uint64_t>(c)});
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    orthogonalize(v, c);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < kIterations; ++it) {
      Vector w = deflated * v;
      orthogonalize(w, c);
      const double len = w.norm();
      if (len < 1e-300) break;  // v spans a null direction; keep it
      w /= len;
      const double change = std::min((w - v).norm(), (w + v).norm());
      v = w;
      lambda = v.dot(cov * v);
      if (change < kTolerance) break;
    }
    // Re-orthogonalize twice so the rows stay orthonormal to ~1e-15.
    orthogonalize(v, c);
    orthogonalize(v, c);
    v.normalize();
    lambda = v.dot(cov * v);
    basis.components.row(c) = v.transpose();
    basis.explained_variance[c] = lambda;
    deflated -= lambda * v * v.transpose();
  }
  return basis;
}

Table SuiteResult::to_table() const {
  Table t({"kind", "severity", "accuracy"});
  t.add_row({std::string("clean"), std::int64_t{0}, clean_accuracy});
  for (const SuiteEntry& e : entries) {
    t.add_row({std::string(corruption_name(e.kind)), static_cast<std::int64_t>(e.severity), e.accuracy});
  }
  return t;
}

std::string SuiteResult::summary_json() const {
  nlohmann::ordered_json j;
  j["clean_accuracy"] = clean_accuracy;
  nlohmann::ordered_json per_kind = nlohmann::ordered_json::object();
  for (const auto& [kind, mean] : kind_means) per_kind[std::string(corruption_name(kind))] = mean;
  j["kind_means"] = per_kind;
  j["overall_mean"] = overall_mean;
  j["gaussian_omitted"] = gaussian_omitted;
  return j.dump(2);
}

SuiteResult evaluate_suite(const Classifier& model, const Dataset& data,
                           std::span<const CorruptionKind> kinds, const SeverityTable& table,
                           std::uint64_t seed, const PcaBasis* basis, bool omit_gaussian_from_mean) {
  if (data.empty()) throw ContractError("evaluate_suite needs a non-empty dataset");
  SuiteResult res;
  res.gaussian_omitted = omit_gaussian_from_mean;
  const std::size_t n = data.size();
  std::size_t clean_ok = 0;
  for (std::size_t i = 0; i < n; ++i) clean_ok += model.predict(data.inputs[i]) == data.labels[i];
  res.clean_accuracy = static_cast<double>(clean_ok) / static_cast<double>(n);

  double overall = 0.0;
  int overall_count = 0;
  for (CorruptionKind kind : kinds) {
    double kind_sum = 0.0;
    for (int severity = 1; severity <= 5; ++severity) {
      const Corruption c = table.at(kind, severity);
      std::vector<char> ok(n, 0);
      parallel_for(n, [&](std::size_t i) {
        // Same stream at every severity, so levels differ only in the parameter.
        RngStream rng(seed, "corrupt", {static_cast<std::uint64_t>(kind), i});
        ok[i] = model.predict(apply_corruption(data.inputs[i], c, rng, basis)) == data.labels[i];
      });
      const double acc =
          static_cast<double>(std::count(ok.begin(), ok.end(), 1)) / static_cast<double>(n);
      res.entries.push_back({kind, severity, acc});
      kind_sum += acc;
    }
    res.kind_means[kind] = kind_sum / 5.0;
    if (!(omit_gaussian_from_mean && kind == CorruptionKind::kGaussianNoise)) {
      overall += kind_sum / 5.0;
      ++overall_count;
    }
  }
  res.overall_mean = overall_count ? overall / overall_count : res.clean_accuracy;
  return res;
}

Table DefenseReport::to_table() const {
  Table t({"sigma", "acc_base", "acc_base_std", "acc_defended", "acc_defended_std", "delta"});
  for (const DefenseRow& r : rows) {
    t.add_row({r.sigma, r.acc_base, r.acc_base_std, r.acc_defended, r.acc_defended_std, r.delta});
  }
  return t;
}

DefenseReport defense_sanity_check(const Classifier& base, const Classifier& defended,
                                   const Dataset& data, std::span<const double> sigma_grid,
                                   int trials, std::uint64_t seed, double threshold) {
  if (sigma_grid.empty()) throw ContractError("defense check needs a non-empty sigma grid");
  if (trials < 2) throw ContractError("defense check needs at least 2 trials");
  if (data.empty()) throw ContractError("defense check needs a non-empty dataset");
  DefenseReport report;
  report.threshold = threshold;
  const std::size_t n = data.size();
  for (std::size_t s = 0; s < sigma_grid.size(); ++s) {
    const double sigma = sigma_grid[s];
    if (!(sigma >= 0.0)) throw ContractError("defense check sigma must be >= 0");
    std::vector<double> acc_b(trials), acc_d(trials);
    for (int t = 0; t < trials; ++t) {
      std::vector<char> ok_b(n, 0), ok_d(n, 0);
      parallel_for(n, [&](std::size_t i) {
        RngStream rng(seed, "defense-noise", {s, static_cast<std::uint64_t>(t), i});
        Vector x = data.inputs[i];
        for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += sigma * rng.normal();
        ok_b[i] = base.predict(x) == data.labels[i];
        ok_d[i] = defended.predict(x) == data.labels[i];
      });
      acc_b[t] = static_cast<double>(std::count(ok_b.begin(), ok_b.end(), 1)) / static_cast<double>(n);
      acc_d[t] = static_cast<double>(std::count(ok_d.begin(), ok_d.end(), 1)) / static_cast<double>(n);
    }
    auto mean_std = [](const std::vector<double>& v, double* mean, double* sd) {
      double m = 0.0;
      for (double a : v) m += a;
      m /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double a : v) ss += (a - m) * (a - m);
      *mean = m;
      *sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    DefenseRow row{};
    row.sigma = sigma;
    mean_std(acc_b, &row.acc_base, &row.acc_base_std);
    mean_std(acc_d, &row.acc_defended, &row.acc_defended_std);
    row.delta = row.acc_defended - row.acc_base;
    if (row.delta > threshold) report.no_improvement = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace robustlab
