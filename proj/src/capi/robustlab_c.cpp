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

#include "robustlab/robustlab.h"

#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

#include "core/attacks.hpp"
#include "core/corruptions.hpp"
#include "core/dataio.hpp"
#include "core/errors.hpp"
#include "core/gaussian_math.hpp"
#include "core/model_io.hpp"
#include "core/models.hpp"
#include "core/noise_lab.hpp"
#include "core/parallel.hpp"
#include "core/slices.hpp"
#include "core/table.hpp"
#include "core/training.hpp"

namespace rl = robustlab;

struct rl_model {
  std::shared_ptr<const rl::Classifier> impl;
};
struct rl_dataset {
  rl::Dataset impl;
};
struct rl_table {
  rl::Table impl;
};
struct rl_pca {
  rl::PcaBasis impl;
};
struct rl_raster {
  rl::SliceRaster impl;
  rl::SliceSpec spec;
};
struct rl_severity {
  rl::SeverityTable impl;
};

namespace {

thread_local std::string g_last_error;
thread_local std::int64_t g_last_offset = -1;

rl_status fail(rl_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <typename Fn>
rl_status guard(Fn&& fn) {
  g_last_offset = -1;
  try {
    fn();
    g_last_error.clear();
    return RL_OK;
  } catch (const rl::DomainError& e) {
    return fail(RL_ERR_DOMAIN, e.what());
  } catch (const rl::DegenerateError& e) {
    return fail(RL_ERR_DEGENERATE, e.what());
  } catch (const rl::ContractError& e) {
    return fail(RL_ERR_CONTRACT, e.what());
  } catch (const rl::ParseError& e) {
    g_last_offset = static_cast<std::int64_t>(e.offset());
    return fail(RL_ERR_PARSE, e.what());
  } catch (const rl::VersionError& e) {
    return fail(RL_ERR_VERSION, e.what());
  } catch (const rl::IoError& e) {
    return fail(RL_ERR_IO, e.what());
  } catch (const rl::UnsupportedError& e) {
    return fail(RL_ERR_UNSUPPORTED, e.what());
  } catch (const rl::NumericalError& e) {
    return fail(RL_ERR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return fail(RL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RL_ERR_INTERNAL, "unknown exception");
  }
}

template <typename T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw rl::ContractError(std::string(name) + " must not be NULL");
}

rl::Vector vec(const double* x, std::size_t n) {
  require(x, "input vector");
  return Eigen::Map<const rl::Vector>(x, static_cast<Eigen::Index>(n));
}

void copy_out(const rl::Vector& v, double* out) {
  require(out, "output buffer");
  std::memcpy(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

const rl::Classifier& model_of(const rl_model* m) {
  require(m, "model");
  return *m->impl;
}

const rl::Dataset& data_of(const rl_dataset* d) {
  require(d, "dataset");
  return d->impl;
}

const rl::LinearModel& linear_of(const rl_model* m) {
  const auto* lin = dynamic_cast<const rl::LinearModel*>(&model_of(m));
  if (!lin) throw rl::UnsupportedError("operation needs a linear model");
  return *lin;
}

rl::PgdConfig to_pgd(const rl_pgd_config& c) {
  rl::PgdConfig p;
  p.norm = c.norm == RL_NORM_LINF ? rl::Norm::kLinf : rl::Norm::kL2;
  p.epsilon = c.epsilon;
  p.steps = c.steps;
  p.step_size = c.step_size;
  if (c.target >= 0) p.target = c.target;
  p.random_start = c.random_start != 0;
  p.stop_on_success = c.stop_on_success != 0;
  p.seed = c.seed;
  return p;
}

rl::NearestErrorSearch to_search(const rl_search_config* c) {
  if (!c) return {};
  rl::NearestErrorSearch s;
  s.eps_lo = c->eps_lo;
  s.eps_hi = c->eps_hi;
  s.bisection_iters = c->bisection_iters;
  s.refine_halvings = c->refine_halvings;
  s.pgd_template = to_pgd(c->pgd);
  return s;
}

rl::SigmaSearch to_sigma_search(const rl_sigma_search* c) {
  if (!c) return {};
  rl::SigmaSearch s;
  s.target_mu = c->target_mu;
  s.mc_samples = c->mc_samples;
  s.sigma_start = c->sigma_start;
  s.sigma_max = c->sigma_max;
  s.bisection_steps = c->bisection_steps;
  s.clip = c->clip != 0;
  return s;
}

rl::TrainConfig to_train(const rl_train_config* c) {
  require(c, "train config");
  rl::TrainConfig t;
  t.epochs = c->epochs;
  t.batch_size = c->batch_size;
  t.learning_rate = c->learning_rate;
  t.weight_decay = c->weight_decay;
  t.momentum = c->momentum;
  t.augment_sigma_max = c->augment_sigma_max;
  t.clip_augmented = c->clip_augmented != 0;
  t.seed = c->seed;
  if (c->n_decays > 0) {
    require(c->decay_epochs, "decay_epochs");
    require(c->decay_factors, "decay_factors");
    for (std::size_t i = 0; i < c->n_decays; ++i) {
      t.lr_decay_schedule.push_back({c->decay_epochs[i], c->decay_factors[i]});
    }
  }
  return t;
}

rl::ModelSpec to_spec(const int* hidden, std::size_t n_hidden) {
  rl::ModelSpec spec;
  if (n_hidden > 0) {
    require(hidden, "hidden widths");
    spec.kind = rl::ModelSpec::Kind::kMlp;
    spec.hidden.assign(hidden, hidden + n_hidden);
  }
  return spec;
}

rl_table* wrap_table(rl::Table t) { return new rl_table{std::move(t)}; }

}  // namespace

extern "C" {

const char* rl_version(void) { return ROBUSTLAB_VERSION; }
const char* rl_last_error(void) { return g_last_error.c_str(); }
int64_t rl_last_error_offset(void) { return g_last_offset; }

const char* rl_status_name(rl_status status) {
  switch (status) {
    case RL_OK: return "ok";
    case RL_ERR_DOMAIN: return "domain error";
    case RL_ERR_CONTRACT: return "contract error";
    case RL_ERR_PARSE: return "parse error";
    case RL_ERR_VERSION: return "version error";
    case RL_ERR_IO: return "i/o error";
    case RL_ERR_DEGENERATE: return "degenerate input";
    case RL_ERR_UNSUPPORTED: return "unsupported";
    case RL_ERR_NUMERICAL: return "numerical failure";
    case RL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void rl_set_num_threads(unsigned n) { rl::set_num_threads(n); }
void rl_string_free(char* s) { std::free(s); }

// ---- Gaussian mathematics

rl_status rl_std_normal_cdf(double t, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::gaussian::std_normal_cdf(t);
  });
}

rl_status rl_std_normal_cdf_inv(double p, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::gaussian::std_normal_cdf_inv(p);
  });
}

rl_status rl_halfspace_distance(double sigma, double mu, double* out, int* clamped) {
  return guard([&] {
    require(out, "out");
    const auto d = rl::gaussian::halfspace_distance(rl::gaussian::NoiseScale(sigma),
                                                    rl::gaussian::Probability(mu));
    *out = d.distance;
    if (clamped) *clamped = d.clamped ? 1 : 0;
  });
}

rl_status rl_halfspace_error_rate(double sigma, double distance, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::gaussian::halfspace_error_rate(rl::gaussian::NoiseScale(sigma), distance);
  });
}

rl_status rl_isoperimetric_median_bound(double sigma, double mu, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::gaussian::isoperimetric_median_bound(rl::gaussian::NoiseScale(sigma),
                                                    rl::gaussian::Probability(mu));
  });
}

rl_status rl_iso_extension_lower_bound(double mu, double eps, double sigma, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::gaussian::iso_extension_lower_bound(rl::gaussian::Probability(mu), eps,
                                                   rl::gaussian::NoiseScale(sigma));
  });
}

rl_status rl_typical_noise_radius(double sigma, int64_t n, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::gaussian::typical_noise_radius(rl::gaussian::NoiseScale(sigma),
                                              rl::gaussian::Dimension(n));
  });
}

rl_status rl_optimal_curve_table(const double* sigmas, size_t n_sigmas, const double* mus,
                                 size_t n_mus, rl_table** out) {
  return guard([&] {
    require(out, "out");
    if (n_sigmas) require(sigmas, "sigmas");
    if (n_mus) require(mus, "mus");
    *out = wrap_table(rl::gaussian::optimal_curve_table({sigmas, n_sigmas}, {mus, n_mus}));
  });
}

// ---- Tables

void rl_table_free(rl_table* t) { delete t; }
size_t rl_table_rows(const rl_table* t) { return t ? t->impl.num_rows() : 0; }
size_t rl_table_cols(const rl_table* t) { return t ? t->impl.num_cols() : 0; }

const char* rl_table_column_name(const rl_table* t, size_t col) {
  if (!t || col >= t->impl.num_cols()) return nullptr;
  return t->impl.columns()[col].c_str();
}

rl_status rl_table_get(const rl_table* t, size_t row, size_t col, double* out) {
  return guard([&] {
    require(t, "table");
    require(out, "out");
    if (row >= t->impl.num_rows() || col >= t->impl.num_cols()) {
      throw rl::ContractError("table cell out of range");
    }
    *out = t->impl.number(row, col);
  });
}

rl_status rl_table_get_by_name(const rl_table* t, size_t row, const char* col, double* out) {
  return guard([&] {
    require(t, "table");
    require(col, "column name");
    require(out, "out");
    if (row >= t->impl.num_rows()) throw rl::ContractError("table row out of range");
    *out = t->impl.number(row, std::string(col));
  });
}

rl_status rl_table_to_csv(const rl_table* t, char** out) {
  return guard([&] {
    require(t, "table");
    require(out, "out");
    *out = dup(t->impl.to_csv());
  });
}

rl_status rl_table_write_csv(const rl_table* t, const char* path) {
  return guard([&] {
    require(t, "table");
    require(path, "path");
    t->impl.write_csv(path);
  });
}

// ---- Models

rl_status rl_model_linear_create(int classes, int dim, const double* weights, const double* biases,
                                 rl_model** out) {
  return guard([&] {
    require(out, "out");
    require(weights, "weights");
    require(biases, "biases");
    if (classes < 2 || dim < 1) throw rl::ContractError("linear model needs classes >= 2, dim >= 1");
    rl::Matrix w = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        weights, classes, dim);
    rl::Vector b = Eigen::Map<const rl::Vector>(biases, classes);
    *out = new rl_model{std::make_shared<rl::LinearModel>(std::move(w), std::move(b))};
  });
}

rl_status rl_model_mlp_create(size_t n_layers, const int* widths, const int* activations,
                              const double* weights, const double* biases, rl_model** out) {
  return guard([&] {
    require(out, "out");
    require(widths, "widths");
    require(activations, "activations");
    require(weights, "weights");
    require(biases, "biases");
    if (n_layers == 0) throw rl::ContractError("mlp needs at least one layer");
    std::vector<rl::DenseLayer> layers;
    std::size_t woff = 0, boff = 0;
    for (std::size_t k = 0; k < n_layers; ++k) {
      const int in = widths[k];
      const int outw = widths[k + 1];
      if (in < 1 || outw < 1) throw rl::ContractError("mlp widths must be positive");
      if (activations[k] != RL_ACT_IDENTITY && activations[k] != RL_ACT_RELU) {
        throw rl::ContractError("unknown activation");
      }
      rl::DenseLayer l;
      l.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          weights + woff, outw, in);
      l.bias = Eigen::Map<const rl::Vector>(biases + boff, outw);
      l.activation = static_cast<rl::Activation>(activations[k]);
      woff += static_cast<std::size_t>(outw) * in;
      boff += static_cast<std::size_t>(outw);
      layers.push_back(std::move(l));
    }
    *out = new rl_model{std::make_shared<rl::MlpModel>(std::move(layers))};
  });
}

rl_status rl_model_bitdepth_wrap(const rl_model* base, int bits, int masked_gradient, rl_model** out) {
  return guard([&] {
    require(base, "base model");
    require(out, "out");
    *out = new rl_model{std::make_shared<rl::BitdepthDefense>(base->impl, bits, masked_gradient != 0)};
  });
}

rl_status rl_model_load(const char* path, rl_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new rl_model{rl::load_model(path)};
  });
}

rl_status rl_model_save(const rl_model* m, const char* path) {
  return guard([&] {
    require(path, "path");
    rl::save_model(model_of(m), path);
  });
}

void rl_model_free(rl_model* m) { delete m; }

rl_model_kind rl_model_get_kind(const rl_model* m) {
  return static_cast<rl_model_kind>(m->impl->kind());
}
int rl_model_input_dim(const rl_model* m) { return m ? m->impl->input_dim() : 0; }
int rl_model_num_classes(const rl_model* m) { return m ? m->impl->num_classes() : 0; }

rl_status rl_model_hash(const rl_model* m, char* out, size_t out_len) {
  return guard([&] {
    require(out, "out");
    if (out_len < 17) throw rl::ContractError("hash buffer needs 17 bytes");
    const std::string h = rl::model_content_hash(model_of(m));
    std::memcpy(out, h.c_str(), h.size() + 1);
  });
}

rl_status rl_model_logits(const rl_model* m, const double* x, size_t n, double* out, size_t out_len) {
  return guard([&] {
    const rl::Vector z = model_of(m).logits(vec(x, n));
    if (out_len < static_cast<std::size_t>(z.size())) throw rl::ContractError("logits buffer too small");
    copy_out(z, out);
  });
}

rl_status rl_model_predict(const rl_model* m, const double* x, size_t n, int* out) {
  return guard([&] {
    require(out, "out");
    *out = model_of(m).predict(vec(x, n));
  });
}

rl_status rl_model_input_gradient(const rl_model* m, const double* x, size_t n, int label,
                                  rl_loss loss, double* out) {
  return guard([&] {
    const rl::Loss l = loss == RL_LOSS_MARGIN ? rl::Loss::kMargin : rl::Loss::kCrossEntropy;
    copy_out(model_of(m).input_gradient(vec(x, n), label, l), out);
  });
}

rl_status rl_linear_boundary_distance(const rl_model* m, const double* x, size_t n, int label,
                                      double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::linear_boundary_distance(linear_of(m), vec(x, n), label);
  });
}

rl_status rl_linear_noise_error_rate(const rl_model* m, const double* x, size_t n, int label,
                                     double sigma, double* out) {
  return guard([&] {
    require(out, "out");
    *out = rl::linear_noise_error_rate(linear_of(m), vec(x, n), label, sigma);
  });
}

// ---- Datasets

rl_status rl_dataset_load_idx(const char* images_path, const char* labels_path, rl_dataset** out) {
  return guard([&] {
    require(images_path, "images path");
    require(labels_path, "labels path");
    require(out, "out");
    *out = new rl_dataset{rl::load_idx(images_path, labels_path)};
  });
}

rl_status rl_dataset_load_csv(const char* path, rl_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new rl_dataset{rl::load_csv(path)};
  });
}

rl_status rl_dataset_save_csv(const rl_dataset* d, const char* path) {
  return guard([&] {
    require(path, "path");
    rl::save_csv(data_of(d), path);
  });
}

rl_status rl_dataset_synth_blobs(int n_classes, int n_per_class, int dim, double centers_scale,
                                 double sigma, uint64_t seed, rl_dataset** out) {
  return guard([&] {
    require(out, "out");
    *out = new rl_dataset{rl::synth_blobs(n_classes, n_per_class, dim, centers_scale, sigma, seed)};
  });
}

rl_desk_spec rl_desk_spec_default(void) {
  const rl::DeskSpec d;
  return {d.n_classes,     d.n_per_class,        d.robust_dims,        d.fragile_dims,
          d.base,          d.robust_separation,  d.robust_spread,      d.fragile_separation,
          d.fragile_spread, d.seed};
}

rl_status rl_dataset_synth_desk(const rl_desk_spec* spec, rl_dataset** out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    rl::DeskSpec d;
    d.n_classes = spec->n_classes;
    d.n_per_class = spec->n_per_class;
    d.robust_dims = spec->robust_dims;
    d.fragile_dims = spec->fragile_dims;
    d.base = spec->base;
    d.robust_separation = spec->robust_separation;
    d.robust_spread = spec->robust_spread;
    d.fragile_separation = spec->fragile_separation;
    d.fragile_spread = spec->fragile_spread;
    d.seed = spec->seed;
    *out = new rl_dataset{rl::synth_desk(d)};
  });
}

rl_status rl_dataset_slice(const rl_dataset* d, size_t begin, size_t end, rl_dataset** out) {
  return guard([&] {
    require(out, "out");
    *out = new rl_dataset{data_of(d).slice(begin, end, rl::Split::kTest)};
  });
}

void rl_dataset_free(rl_dataset* d) { delete d; }
size_t rl_dataset_size(const rl_dataset* d) { return d ? d->impl.size() : 0; }
int rl_dataset_dim(const rl_dataset* d) { return d ? d->impl.dim() : 0; }
int rl_dataset_num_classes(const rl_dataset* d) { return d ? d->impl.num_classes : 0; }

rl_status rl_dataset_get(const rl_dataset* d, size_t i, double* x, int* label) {
  return guard([&] {
    const rl::Dataset& data = data_of(d);
    if (i >= data.size()) throw rl::ContractError("dataset index out of range");
    if (x) copy_out(data.inputs[i], x);
    if (label) *label = data.labels[i];
  });
}

// ---- Training

rl_train_config rl_train_config_default(void) {
  const rl::TrainConfig t;
  rl_train_config c{};
  c.epochs = t.epochs;
  c.batch_size = t.batch_size;
  c.learning_rate = t.learning_rate;
  c.weight_decay = t.weight_decay;
  c.momentum = t.momentum;
  c.augment_sigma_max = t.augment_sigma_max;
  c.clip_augmented = 0;
  c.seed = t.seed;
  return c;
}

rl_status rl_train(const rl_dataset* d, const int* hidden, size_t n_hidden, const rl_train_config* cfg,
                   rl_model** model_out, char** report_json) {
  return guard([&] {
    require(model_out, "model_out");
    rl::TrainResult r = rl::train(data_of(d), to_spec(hidden, n_hidden), to_train(cfg));
    if (report_json) *report_json = dup(r.report.to_json());
    *model_out = new rl_model{std::move(r.model)};
  });
}

rl_status rl_train_with_test(const rl_dataset* train, const rl_dataset* test, const int* hidden,
                             size_t n_hidden, const rl_train_config* cfg, double test_sigma,
                             int test_draws, rl_model** model_out, char** report_json) {
  return guard([&] {
    require(model_out, "model_out");
    rl::TrainResult r = rl::train(data_of(train), to_spec(hidden, n_hidden), to_train(cfg));
    const rl::Dataset& t = data_of(test);
    r.report.clean_test_acc = rl::evaluate(*r.model, t, 0.0, 1, cfg->seed);
    if (test_sigma > 0.0) {
      r.report.noisy_test_acc =
          rl::evaluate(*r.model, t, test_sigma, test_draws, rl::derive_seed(cfg->seed, "test-noise"));
    }
    if (report_json) *report_json = dup(r.report.to_json());
    *model_out = new rl_model{std::move(r.model)};
  });
}

rl_status rl_evaluate(const rl_model* m, const rl_dataset* d, double noise_sigma, int n_noise_draws,
                      uint64_t seed, int clip, double* accuracy) {
  return guard([&] {
    require(accuracy, "accuracy");
    *accuracy = rl::evaluate(model_of(m), data_of(d), noise_sigma, n_noise_draws, seed, clip != 0);
  });
}

// ---- Attacks

rl_pgd_config rl_pgd_config_default(double epsilon) {
  const rl::PgdConfig p = rl::PgdConfig::standard(rl::Norm::kL2, epsilon);
  return {RL_NORM_L2, p.epsilon, p.steps, p.step_size, -1, 0, 0, 0};
}

rl_status rl_pgd(const rl_model* m, const double* x, size_t n, int label, const rl_pgd_config* cfg,
                 double* adversarial_out, rl_attack_result* out) {
  return guard([&] {
    require(cfg, "config");
    require(out, "out");
    const rl::AttackResult r = rl::pgd(model_of(m), vec(x, n), label, to_pgd(*cfg));
    if (adversarial_out) copy_out(r.adversarial_point, adversarial_out);
    out->success = r.success ? 1 : 0;
    out->distance = r.distance;
    out->predicted = r.predicted;
  });
}

rl_search_config rl_search_config_default(void) {
  const rl::NearestErrorSearch s;
  rl_search_config c{};
  c.eps_lo = s.eps_lo;
  c.eps_hi = s.eps_hi;
  c.bisection_iters = s.bisection_iters;
  c.refine_halvings = s.refine_halvings;
  c.pgd = rl_pgd_config_default(s.pgd_template.epsilon);
  c.pgd.steps = s.pgd_template.steps;
  return c;
}

rl_status rl_nearest_error(const rl_model* m, const double* x, size_t n, int label,
                           const rl_search_config* cfg, double* witness_out, rl_boundary_estimate* out) {
  return guard([&] {
    require(out, "out");
    const rl::BoundaryDistanceEstimate e = rl::nearest_error(model_of(m), vec(x, n), label, to_search(cfg));
    if (witness_out) copy_out(e.witness, witness_out);
    out->distance = e.distance;
    out->converged = e.converged ? 1 : 0;
  });
}

rl_status rl_nearest_error_batch(const rl_model* m, const rl_dataset* d, const rl_search_config* cfg,
                                 rl_table** out) {
  return guard([&] {
    require(out, "out");
    *out = wrap_table(rl::nearest_error_batch(model_of(m), data_of(d), to_search(cfg)));
  });
}

rl_status rl_robustness_curve(const rl_model* m, const rl_dataset* d, const double* eps, size_t n_eps,
                              const rl_pgd_config* cfg, rl_table** out) {
  return guard([&] {
    require(out, "out");
    require(cfg, "config");
    if (n_eps) require(eps, "eps grid");
    *out = wrap_table(rl::robustness_curve(model_of(m), data_of(d), {eps, n_eps}, to_pgd(*cfg)));
  });
}

// ---- Noise lab

rl_status rl_estimate_error_rate(const rl_model* m, const double* x, size_t n, int label, double sigma,
                                 int64_t n_samples, uint64_t seed, int clip, rl_noise_estimate* out) {
  return guard([&] {
    require(out, "out");
    const rl::NoiseErrorEstimate e =
        rl::estimate_error_rate(model_of(m), vec(x, n), sigma, label, n_samples, seed, clip != 0);
    *out = {e.mu_hat, e.n_samples, e.n_errors, e.ci_low, e.ci_high};
  });
}

rl_sigma_search rl_sigma_search_default(void) {
  const rl::SigmaSearch s;
  return {s.target_mu, s.mc_samples, s.sigma_start, s.sigma_max, s.bisection_steps, 0};
}

rl_status rl_sigma_at_error_rate(const rl_model* m, const double* x, size_t n, int label,
                                 const rl_sigma_search* search, uint64_t seed, rl_sigma_result* out) {
  return guard([&] {
    require(out, "out");
    const rl::SigmaAtErrorRate r =
        rl::sigma_at_error_rate(model_of(m), vec(x, n), label, to_sigma_search(search), seed);
    *out = {r.sigma_star, r.sigma_lo, r.sigma_hi, r.converged ? 1 : 0};
  });
}

rl_status rl_median_noisy_distance(const rl_model* m, const double* x, size_t n, int label, double sigma,
                                   int64_t n_noise_samples, const rl_search_config* search,
                                   uint64_t seed, int clip, double* eps_star_out, double* distances_out) {
  return guard([&] {
    require(eps_star_out, "eps_star_out");
    const rl::MedianNoisyDistance r = rl::median_noisy_distance(
        model_of(m), vec(x, n), sigma, label, n_noise_samples, to_search(search), seed, clip != 0);
    *eps_star_out = r.eps_star_hat;
    if (distances_out) std::memcpy(distances_out, r.distances.data(), sizeof(double) * r.distances.size());
  });
}

rl_status rl_sigma_sweep(const rl_model* m, const rl_dataset* d, size_t group_size,
                         const rl_sigma_search* sigma_search, const rl_search_config* distance_search,
                         uint64_t seed, rl_table** per_point, rl_table** groups) {
  return guard([&] {
    require(per_point, "per_point");
    require(groups, "groups");
    rl::SigmaSweepConfig cfg;
    cfg.group_size = group_size;
    cfg.sigma_search = to_sigma_search(sigma_search);
    cfg.distance_search = to_search(distance_search);
    cfg.seed = seed;
    rl::SigmaSweepResult r = rl::sigma_sweep(model_of(m), data_of(d), cfg);
    *per_point = wrap_table(std::move(r.per_point));
    *groups = wrap_table(std::move(r.groups));
  });
}

rl_status rl_iso_gap_report(const rl_model* m, const rl_dataset* d, double sigma, int64_t mc_samples,
                            int64_t noise_samples, const rl_search_config* search, double slack,
                            uint64_t seed, int clip, rl_table** out) {
  return guard([&] {
    require(out, "out");
    rl::IsoConfig cfg;
    cfg.sigma = sigma;
    cfg.mc_samples = mc_samples;
    cfg.noise_samples = noise_samples;
    cfg.search = to_search(search);
    cfg.slack = slack;
    cfg.seed = seed;
    cfg.clip = clip != 0;
    *out = wrap_table(rl::iso_gap_report(model_of(m), data_of(d), cfg));
  });
}

rl_status rl_error_rate_cdf(const rl_model* m, const rl_dataset* d, double sigma,
                            int64_t samples_per_point, int n_thresholds, uint64_t seed, int clip,
                            rl_table** out) {
  return guard([&] {
    require(out, "out");
    *out = wrap_table(rl::error_rate_cdf(model_of(m), data_of(d), sigma, samples_per_point, seed,
                                         n_thresholds, clip != 0));
  });
}

// ---- Corruptions

rl_status rl_severity_load(const char* path, rl_severity** out) {
  return guard([&] {
    require(out, "out");
    *out = new rl_severity{path ? rl::SeverityTable::load(path) : rl::SeverityTable::defaults()};
  });
}

void rl_severity_free(rl_severity* s) { delete s; }

rl_status rl_pca_fit(const rl_dataset* d, int k, uint64_t seed, rl_pca** out) {
  return guard([&] {
    require(out, "out");
    *out = new rl_pca{rl::fit_pca(data_of(d), k, seed)};
  });
}

void rl_pca_free(rl_pca* p) { delete p; }
int rl_pca_k(const rl_pca* p) { return p ? p->impl.k() : 0; }

rl_status rl_pca_components(const rl_pca* p, double* out, size_t out_len) {
  return guard([&] {
    require(p, "pca");
    require(out, "out");
    const rl::Matrix& c = p->impl.components;
    if (out_len < static_cast<std::size_t>(c.size())) throw rl::ContractError("components buffer too small");
    for (Eigen::Index r = 0; r < c.rows(); ++r)
      for (Eigen::Index k = 0; k < c.cols(); ++k) out[r * c.cols() + k] = c(r, k);
  });
}

rl_status rl_apply_corruption(const double* x, size_t n, const char* kind, int severity, double param,
                              const rl_severity* table, const rl_pca* basis, uint64_t seed, double* out) {
  return guard([&] {
    require(kind, "kind");
    const rl::CorruptionKind k = rl::corruption_from_name(kind);
    rl::Corruption c{k, param};
    if (severity != 0) {
      c = table ? table->impl.at(k, severity) : rl::SeverityTable::defaults().at(k, severity);
    }
    rl::RngStream rng(seed, "apply-corruption");
    copy_out(rl::apply_corruption(vec(x, n), c, rng, basis ? &basis->impl : nullptr), out);
  });
}

rl_status rl_evaluate_suite(const rl_model* m, const rl_dataset* d, const char* kinds,
                            const rl_severity* table, const rl_pca* basis, uint64_t seed,
                            int omit_gaussian, rl_table** out, char** summary_json) {
  return guard([&] {
    require(out, "out");
    std::vector<rl::CorruptionKind> list;
    if (kinds && *kinds) {
      std::stringstream ss(kinds);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) list.push_back(rl::corruption_from_name(item));
      }
    } else {
      for (rl::CorruptionKind k : rl::kAllCorruptions) {
        if (k == rl::CorruptionKind::kPcaNoise && !basis) continue;
        if (k == rl::CorruptionKind::kPixelate) {
          const int dim = data_of(d).dim();
          const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
          if (side * side != dim) continue;
        }
        list.push_back(k);
      }
    }
    const rl::SeverityTable defaults = rl::SeverityTable::defaults();
    const rl::SuiteResult r = rl::evaluate_suite(model_of(m), data_of(d), list,
                                                 table ? table->impl : defaults, seed,
                                                 basis ? &basis->impl : nullptr, omit_gaussian != 0);
    if (summary_json) *summary_json = dup(r.summary_json());
    *out = wrap_table(r.to_table());
  });
}

rl_status rl_defense_sanity_check(const rl_model* base, const rl_model* defended, const rl_dataset* d,
                                  const double* sigmas, size_t n_sigmas, int trials, uint64_t seed,
                                  double threshold, rl_table** out, int* no_improvement) {
  return guard([&] {
    require(out, "out");
    if (n_sigmas) require(sigmas, "sigmas");
    const rl::DefenseReport r = rl::defense_sanity_check(model_of(base), model_of(defended), data_of(d),
                                                         {sigmas, n_sigmas}, trials, seed, threshold);
    if (no_improvement) *no_improvement = r.no_improvement ? 1 : 0;
    *out = wrap_table(r.to_table());
  });
}

// ---- Slices

rl_status rl_slice_rasterize(const rl_model* m, const double* anchor, const double* p1, const double* p2,
                             size_t n, const rl_slice_spec* spec, rl_raster** out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    rl::SliceSpec s;
    s.anchor = vec(anchor, n);
    s.p1 = vec(p1, n);
    s.p2 = vec(p2, n);
    s.half_extent = spec->half_extent;
    s.resolution = spec->resolution;
    if (spec->circle_radius > 0) s.circle_radius = spec->circle_radius;
    if (spec->linf_radius > 0) s.linf_radius = spec->linf_radius;
    rl::SliceRaster r = rl::rasterize(model_of(m), s);
    *out = new rl_raster{std::move(r), std::move(s)};
  });
}

void rl_raster_free(rl_raster* r) { delete r; }
int rl_raster_resolution(const rl_raster* r) { return r ? r->impl.resolution : 0; }

int rl_raster_class(const rl_raster* r, int row, int col) {
  if (!r || row < 0 || col < 0 || row >= r->impl.resolution || col >= r->impl.resolution) return -1;
  return r->impl.class_at(row, col);
}

double rl_raster_confidence(const rl_raster* r, int row, int col) {
  if (!r || row < 0 || col < 0 || row >= r->impl.resolution || col >= r->impl.resolution) return -1.0;
  return r->impl.confidence_at(row, col);
}

rl_status rl_raster_export(const rl_raster* r, const char* path_prefix) {
  return guard([&] {
    require(r, "raster");
    require(path_prefix, "path prefix");
    rl::export_raster(r->impl, r->spec, path_prefix);
  });
}

}  // extern "C"
