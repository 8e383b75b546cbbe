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

/*
 * robustlab C API.
 *
 * Every function returns an rl_status. On failure the thread-local message
 * from rl_last_error() describes what went wrong; outputs are left
 * untouched. Objects are opaque handles created by rl_*_create / rl_*_load
 * style functions and released with the matching rl_*_free. Handles are
 * immutable after creation and may be shared between threads.
 */
#ifndef ROBUSTLAB_H_
#define ROBUSTLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ROBUSTLAB_BUILDING_LIBRARY)
#define RL_API __attribute__((visibility("default")))
#else
#define RL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_DOMAIN = 1,      /* argument outside a function's mathematical domain */
  RL_ERR_CONTRACT = 2,    /* bad argument, dimension mismatch, invalid config */
  RL_ERR_PARSE = 3,       /* malformed file; see rl_last_error_offset() */
  RL_ERR_VERSION = 4,     /* file format version not supported */
  RL_ERR_IO = 5,
  RL_ERR_DEGENERATE = 6,  /* degenerate geometry (collinear slice, identical classes) */
  RL_ERR_UNSUPPORTED = 7,
  RL_ERR_NUMERICAL = 8,   /* NaN loss, non-finite gradient */
  RL_ERR_INTERNAL = 9
} rl_status;

typedef struct rl_model rl_model;
typedef struct rl_dataset rl_dataset;
typedef struct rl_table rl_table;
typedef struct rl_pca rl_pca;
typedef struct rl_raster rl_raster;
typedef struct rl_severity rl_severity;

RL_API const char* rl_version(void);
RL_API const char* rl_last_error(void);
/* Byte offset of the last RL_ERR_PARSE on this thread, or -1. */
RL_API int64_t rl_last_error_offset(void);
RL_API const char* rl_status_name(rl_status status);
/* 0 = hardware concurrency. Results never depend on the thread count. */
RL_API void rl_set_num_threads(unsigned n);

/* Strings returned through char** are owned by the caller. */
RL_API void rl_string_free(char* s);

/* ---- Gaussian half-space mathematics ---------------------------------- */

RL_API rl_status rl_std_normal_cdf(double t, double* out);
RL_API rl_status rl_std_normal_cdf_inv(double p, double* out);
/* -sigma * Phi^-1(mu); mu > 1/2 is clamped to 0 and *clamped set to 1. */
RL_API rl_status rl_halfspace_distance(double sigma, double mu, double* out, int* clamped);
RL_API rl_status rl_halfspace_error_rate(double sigma, double distance, double* out);
RL_API rl_status rl_isoperimetric_median_bound(double sigma, double mu, double* out);
RL_API rl_status rl_iso_extension_lower_bound(double mu, double eps, double sigma, double* out);
RL_API rl_status rl_typical_noise_radius(double sigma, int64_t n, double* out);
/* Columns sigma, mu, distance. */
RL_API rl_status rl_optimal_curve_table(const double* sigmas, size_t n_sigmas, const double* mus,
                                        size_t n_mus, rl_table** out);

/* ---- Result tables ---------------------------------------------------- */

RL_API void rl_table_free(rl_table* t);
RL_API size_t rl_table_rows(const rl_table* t);
RL_API size_t rl_table_cols(const rl_table* t);
RL_API const char* rl_table_column_name(const rl_table* t, size_t col);
/* Numeric value of a cell; RL_ERR_CONTRACT for text cells. */
RL_API rl_status rl_table_get(const rl_table* t, size_t row, size_t col, double* out);
RL_API rl_status rl_table_get_by_name(const rl_table* t, size_t row, const char* col, double* out);
RL_API rl_status rl_table_to_csv(const rl_table* t, char** out);
RL_API rl_status rl_table_write_csv(const rl_table* t, const char* path);

/* ---- Models ------------------------------------------------------------ */

typedef enum rl_loss { RL_LOSS_CROSS_ENTROPY = 0, RL_LOSS_MARGIN = 1 } rl_loss;
typedef enum rl_model_kind { RL_MODEL_LINEAR = 0, RL_MODEL_MLP = 1, RL_MODEL_BITDEPTH = 2 } rl_model_kind;
typedef enum rl_activation { RL_ACT_IDENTITY = 0, RL_ACT_RELU = 1 } rl_activation;

/* weights: classes x dim row-major; biases: classes. */
RL_API rl_status rl_model_linear_create(int classes, int dim, const double* weights,
                                        const double* biases, rl_model** out);
/* widths has n_layers + 1 entries (input width first). Layer k has a
 * widths[k+1] x widths[k] row-major weight block in `weights` followed
 * consecutively by the next layer's; biases likewise. */
RL_API rl_status rl_model_mlp_create(size_t n_layers, const int* widths, const int* activations,
                                     const double* weights, const double* biases, rl_model** out);
RL_API rl_status rl_model_bitdepth_wrap(const rl_model* base, int bits, int masked_gradient,
                                        rl_model** out);
RL_API rl_status rl_model_load(const char* path, rl_model** out);
RL_API rl_status rl_model_save(const rl_model* m, const char* path);
RL_API void rl_model_free(rl_model* m);

RL_API rl_model_kind rl_model_get_kind(const rl_model* m);
RL_API int rl_model_input_dim(const rl_model* m);
RL_API int rl_model_num_classes(const rl_model* m);
/* 16 hex digits + NUL written into out (>= 17 bytes). */
RL_API rl_status rl_model_hash(const rl_model* m, char* out, size_t out_len);

RL_API rl_status rl_model_logits(const rl_model* m, const double* x, size_t n, double* out,
                                 size_t out_len);
RL_API rl_status rl_model_predict(const rl_model* m, const double* x, size_t n, int* out);
RL_API rl_status rl_model_input_gradient(const rl_model* m, const double* x, size_t n, int label,
                                         rl_loss loss, double* out);
/* Linear models only. */
RL_API rl_status rl_linear_boundary_distance(const rl_model* m, const double* x, size_t n,
                                             int label, double* out);
/* Binary linear models only. */
RL_API rl_status rl_linear_noise_error_rate(const rl_model* m, const double* x, size_t n, int label,
                                            double sigma, double* out);

/* ---- Datasets ----------------------------------------------------------- */

RL_API rl_status rl_dataset_load_idx(const char* images_path, const char* labels_path,
                                     rl_dataset** out);
RL_API rl_status rl_dataset_load_csv(const char* path, rl_dataset** out);
RL_API rl_status rl_dataset_save_csv(const rl_dataset* d, const char* path);
RL_API rl_status rl_dataset_synth_blobs(int n_classes, int n_per_class, int dim,
                                        double centers_scale, double sigma, uint64_t seed,
                                        rl_dataset** out);

typedef struct rl_desk_spec {
  int n_classes;
  int n_per_class;
  int robust_dims;
  int fragile_dims;
  double base;
  double robust_separation;
  double robust_spread;
  double fragile_separation;
  double fragile_spread;
  uint64_t seed;
} rl_desk_spec;
RL_API rl_desk_spec rl_desk_spec_default(void);
RL_API rl_status rl_dataset_synth_desk(const rl_desk_spec* spec, rl_dataset** out);
/* Rows [begin, end) as a new dataset. */
RL_API rl_status rl_dataset_slice(const rl_dataset* d, size_t begin, size_t end, rl_dataset** out);
RL_API void rl_dataset_free(rl_dataset* d);
RL_API size_t rl_dataset_size(const rl_dataset* d);
RL_API int rl_dataset_dim(const rl_dataset* d);
RL_API int rl_dataset_num_classes(const rl_dataset* d);
/* Copies row i into x (length dim) and its label. */
RL_API rl_status rl_dataset_get(const rl_dataset* d, size_t i, double* x, int* label);

/* ---- Training ---------------------------------------------------------- */

typedef struct rl_train_config {
  int epochs;
  int batch_size;
  double learning_rate;
  double weight_decay;
  double momentum;
  double augment_sigma_max; /* 0 disables Gaussian augmentation */
  int clip_augmented;
  uint64_t seed;
  /* Learning rate multiplied by decay_factors[k] from epoch decay_epochs[k]. */
  const int* decay_epochs;
  const double* decay_factors;
  size_t n_decays;
} rl_train_config;
RL_API rl_train_config rl_train_config_default(void);

/* hidden == NULL / n_hidden == 0 trains a linear model. The report JSON is
 * {"epochs":[{"epoch","loss","train_acc"}...],"final":{...}}. */
RL_API rl_status rl_train(const rl_dataset* d, const int* hidden, size_t n_hidden,
                          const rl_train_config* cfg, rl_model** model_out, char** report_json);
/* Same as rl_train plus final clean/noisy accuracy on `test` in the report. */
RL_API rl_status rl_train_with_test(const rl_dataset* train, const rl_dataset* test,
                                    const int* hidden, size_t n_hidden, const rl_train_config* cfg,
                                    double test_sigma, int test_draws, rl_model** model_out,
                                    char** report_json);
RL_API rl_status rl_evaluate(const rl_model* m, const rl_dataset* d, double noise_sigma,
                             int n_noise_draws, uint64_t seed, int clip, double* accuracy);

/* ---- Attacks ------------------------------------------------------------ */

typedef enum rl_norm { RL_NORM_L2 = 0, RL_NORM_LINF = 1 } rl_norm;

typedef struct rl_pgd_config {
  rl_norm norm;
  double epsilon;
  int steps;
  double step_size;
  int target; /* -1 for untargeted */
  int random_start;
  int stop_on_success;
  uint64_t seed;
} rl_pgd_config;
/* 100 steps of epsilon/25, L2, untargeted. */
RL_API rl_pgd_config rl_pgd_config_default(double epsilon);

typedef struct rl_attack_result {
  int success;
  double distance;
  int predicted;
} rl_attack_result;

/* adversarial_out receives n values. */
RL_API rl_status rl_pgd(const rl_model* m, const double* x, size_t n, int label,
                        const rl_pgd_config* cfg, double* adversarial_out, rl_attack_result* out);

typedef struct rl_search_config {
  double eps_lo;
  double eps_hi;
  int bisection_iters;
  int refine_halvings;
  rl_pgd_config pgd; /* radius/step ratio is kept when rescaled per trial */
} rl_search_config;
/* [0, 1], 12 bisections, 20 refinement halvings, PGD 200 steps of eps/25. */
RL_API rl_search_config rl_search_config_default(void);

typedef struct rl_boundary_estimate {
  double distance;
  int converged;
} rl_boundary_estimate;

RL_API rl_status rl_nearest_error(const rl_model* m, const double* x, size_t n, int label,
                                  const rl_search_config* cfg, double* witness_out,
                                  rl_boundary_estimate* out);
/* Columns point_id, distance, converged. */
RL_API rl_status rl_nearest_error_batch(const rl_model* m, const rl_dataset* d,
                                        const rl_search_config* cfg, rl_table** out);
/* Columns epsilon, adversarial_accuracy. */
RL_API rl_status rl_robustness_curve(const rl_model* m, const rl_dataset* d, const double* eps,
                                     size_t n_eps, const rl_pgd_config* cfg, rl_table** out);

/* ---- Noise lab ---------------------------------------------------------- */

typedef struct rl_noise_estimate {
  double mu_hat;
  int64_t n_samples;
  int64_t n_errors;
  double ci_low;
  double ci_high;
} rl_noise_estimate;

RL_API rl_status rl_estimate_error_rate(const rl_model* m, const double* x, size_t n, int label,
                                        double sigma, int64_t n_samples, uint64_t seed, int clip,
                                        rl_noise_estimate* out);

typedef struct rl_sigma_search {
  double target_mu;
  int64_t mc_samples;
  double sigma_start;
  double sigma_max;
  int bisection_steps;
  int clip;
} rl_sigma_search;
/* mu = 0.01, 2000 samples, bracket from 1e-3 up to 10, 20 bisections. */
RL_API rl_sigma_search rl_sigma_search_default(void);

typedef struct rl_sigma_result {
  double sigma_star;
  double sigma_lo;
  double sigma_hi;
  int converged;
} rl_sigma_result;

RL_API rl_status rl_sigma_at_error_rate(const rl_model* m, const double* x, size_t n, int label,
                                        const rl_sigma_search* search, uint64_t seed,
                                        rl_sigma_result* out);

/* distances_out (optional) receives n_noise_samples values. */
RL_API rl_status rl_median_noisy_distance(const rl_model* m, const double* x, size_t n, int label,
                                          double sigma, int64_t n_noise_samples,
                                          const rl_search_config* search, uint64_t seed, int clip,
                                          double* eps_star_out, double* distances_out);

/* per_point: point_id, sigma_star, converged, distance, distance_converged.
 * groups: group, n_points, sigma_median, sigma_p25, sigma_p75,
 *         distance_median, distance_p25, distance_p75, halfspace_distance. */
RL_API rl_status rl_sigma_sweep(const rl_model* m, const rl_dataset* d, size_t group_size,
                                const rl_sigma_search* sigma_search,
                                const rl_search_config* distance_search, uint64_t seed,
                                rl_table** per_point, rl_table** groups);

/* Columns point_id, mu_hat, ci_low, ci_high, eps_star, bound, violation. */
RL_API rl_status rl_iso_gap_report(const rl_model* m, const rl_dataset* d, double sigma,
                                   int64_t mc_samples, int64_t noise_samples,
                                   const rl_search_config* search, double slack, uint64_t seed,
                                   int clip, rl_table** out);

/* Columns threshold, fraction. */
RL_API rl_status rl_error_rate_cdf(const rl_model* m, const rl_dataset* d, double sigma,
                                   int64_t samples_per_point, int n_thresholds, uint64_t seed,
                                   int clip, rl_table** out);

/* ---- Corruptions --------------------------------------------------------- */

/* path == NULL gives the built-in table. */
RL_API rl_status rl_severity_load(const char* path, rl_severity** out);
RL_API void rl_severity_free(rl_severity* s);

RL_API rl_status rl_pca_fit(const rl_dataset* d, int k, uint64_t seed, rl_pca** out);
RL_API void rl_pca_free(rl_pca* p);
RL_API int rl_pca_k(const rl_pca* p);
/* row-major k x dim into out. */
RL_API rl_status rl_pca_components(const rl_pca* p, double* out, size_t out_len);

/* kind names: gaussian_noise, shot_noise, impulse_noise, pepper_noise,
 * contrast, brightness, pixelate, pca_noise. `param` overrides the table
 * when severity == 0. */
RL_API rl_status rl_apply_corruption(const double* x, size_t n, const char* kind, int severity,
                                     double param, const rl_severity* table, const rl_pca* basis,
                                     uint64_t seed, double* out);

/* kinds: comma-separated names (NULL = all that apply; pca_noise needs a
 * basis). table: kind, severity, accuracy with a leading clean row. */
RL_API rl_status rl_evaluate_suite(const rl_model* m, const rl_dataset* d, const char* kinds,
                                   const rl_severity* table, const rl_pca* basis, uint64_t seed,
                                   int omit_gaussian, rl_table** out, char** summary_json);

/* Columns sigma, acc_base, acc_base_std, acc_defended, acc_defended_std, delta. */
RL_API rl_status rl_defense_sanity_check(const rl_model* base, const rl_model* defended,
                                         const rl_dataset* d, const double* sigmas,
                                         size_t n_sigmas, int trials, uint64_t seed,
                                         double threshold, rl_table** out, int* no_improvement);

/* ---- Slices ------------------------------------------------------------- */

typedef struct rl_slice_spec {
  double half_extent;
  int resolution;       /* odd */
  double circle_radius; /* <= 0 disables */
  double linf_radius;   /* <= 0 disables */
} rl_slice_spec;

RL_API rl_status rl_slice_rasterize(const rl_model* m, const double* anchor, const double* p1,
                                    const double* p2, size_t n, const rl_slice_spec* spec,
                                    rl_raster** out);
RL_API void rl_raster_free(rl_raster* r);
RL_API int rl_raster_resolution(const rl_raster* r);
RL_API int rl_raster_class(const rl_raster* r, int row, int col);
RL_API double rl_raster_confidence(const rl_raster* r, int row, int col);
/* Writes <prefix>.ppm, <prefix>.csv, <prefix>.json. */
RL_API rl_status rl_raster_export(const rl_raster* r, const char* path_prefix);

#ifdef __cplusplus
}
#endif

#endif /* ROBUSTLAB_H_ */
