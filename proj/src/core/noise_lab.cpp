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

#include "core/noise_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "core/errors.hpp"
#include "core/gaussian_math.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace robustlab {

void clopper_pearson(std::int64_t k, std::int64_t n, double confidence, double* low, double* high) {
  if (n < 1 || k < 0 || k > n) throw ContractError("clopper_pearson needs 0 <= k <= n, n >= 1");
  const double alpha = 1.0 - confidence;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  *low = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
  *high = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
}

namespace {

Vector noisy_copy(const Vector& center, double sigma, RngStream& rng, bool clip) {
  Vector x = center;
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += sigma * rng.normal();
  if (clip) x = x.cwiseMax(0.0).cwiseMin(1.0);
  return x;
}

}  // namespace

NoiseErrorEstimate estimate_error_rate(const Classifier& model, const Vector& center, double sigma,
                                       int label, std::int64_t n_samples, std::uint64_t seed,
                                       bool clip) {
  const gaussian::NoiseScale scale(sigma);
  if (n_samples < 100) throw ContractError("estimate_error_rate needs at least 100 samples");
  if (center.size() != model.input_dim()) throw ContractError("noise center dimension mismatch");
  std::int64_t errors = 0;
  for (std::int64_t j = 0; j < n_samples; ++j) {
    RngStream rng(seed, "noise-draw", {static_cast<std::uint64_t>(j)});
    if (model.predict(noisy_copy(center, scale.value(), rng, clip)) != label) ++errors;
  }
  NoiseErrorEstimate est;
  est.n_samples = n_samples;
  est.n_errors = errors;
  est.mu_hat = static_cast<double>(errors) / static_cast<double>(n_samples);
  est.seed = seed;
  clopper_pearson(errors, n_samples, 0.95, &est.ci_low, &est.ci_high);
  return est;
}

SigmaAtErrorRate sigma_at_error_rate(const Classifier& model, const Vector& x, int label,
                                     const SigmaSearch& search, std::uint64_t seed) {
  if (!(search.target_mu > 0.0 && search.target_mu < 0.5)) {
    throw ContractError("target_mu must lie in (0, 0.5)");
  }
  if (!(search.sigma_start > 0.0) || !(search.sigma_max > search.sigma_start)) {
    throw ContractError("sigma search needs 0 < sigma_start < sigma_max");
  }
  SigmaAtErrorRate out;
  out.target_mu = search.target_mu;
  if (model.predict(x) != label) {
    out.converged = true;
    return out;
  }
  auto rate = [&](double sigma) {
    const std::uint64_t s = derive_seed(seed, "sigma-eval", {static_cast<std::uint64_t>(out.evaluations)});
    ++out.evaluations;
    return estimate_error_rate(model, x, sigma, label, search.mc_samples, s, search.clip).mu_hat;
  };

  double lo = 0.0;
  double mu_lo = 0.0;
  double hi = search.sigma_start;
  double mu_hi = rate(hi);
  while (mu_hi < search.target_mu) {
    lo = hi;
    mu_lo = mu_hi;
    if (hi >= search.sigma_max) {
      out.sigma_lo = lo;
      out.sigma_hi = hi;
      out.mu_at_lo = mu_lo;
      out.mu_at_hi = mu_hi;
      out.sigma_star = search.sigma_max;
      out.converged = false;
      return out;
    }
    hi = std::min(2.0 * hi, search.sigma_max);
    mu_hi = rate(hi);
  }
  for (int it = 0; it < search.bisection_steps; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mu = rate(mid);
    if (mu < search.target_mu) {
      lo = mid;
      mu_lo = mu;
    } else {
      hi = mid;
      mu_hi = mu;
    }
  }
  out.sigma_lo = lo;
  out.sigma_hi = hi;
  out.mu_at_lo = mu_lo;
  out.mu_at_hi = mu_hi;
  out.sigma_star = 0.5 * (lo + hi);
  out.converged = true;
  return out;
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ContractError("quantile of an empty sample");
  const auto rank = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
  return values[rank];
}

MedianNoisyDistance median_noisy_distance(const Classifier& model, const Vector& center,
                                          double sigma, int label, std::int64_t n_noise_samples,
                                          const NearestErrorSearch& search, std::uint64_t seed,
                                          bool clip) {
  const gaussian::NoiseScale scale(sigma);
  if (n_noise_samples < 10) throw ContractError("median_noisy_distance needs at least 10 draws");
  search.validate();
  MedianNoisyDistance out;
  out.n_noise_samples = n_noise_samples;
  out.distances.assign(static_cast<std::size_t>(n_noise_samples), 0.0);
  out.converged.assign(static_cast<std::size_t>(n_noise_samples), 1);
  parallel_for(static_cast<std::size_t>(n_noise_samples), [&](std::size_t j) {
    RngStream rng(seed, "median-draw", {j});
    const Vector xj = noisy_copy(center, scale.value(), rng, clip);
    NearestErrorSearch s = search;
    s.pgd_template.seed = derive_seed(seed, "median-attack", {j});
    const BoundaryDistanceEstimate est = nearest_error(model, xj, label, s);
    out.distances[j] = est.distance;
    out.converged[j] = est.converged ? 1 : 0;
  });
  out.n_unconverged = std::count(out.converged.begin(), out.converged.end(), 0);
  out.eps_star_hat = sample_quantile(out.distances, 0.5);
  return out;
}

SigmaSweepResult sigma_sweep(const Classifier& model, const Dataset& data, const SigmaSweepConfig& config) {
  if (data.empty()) throw ContractError("sigma_sweep needs a non-empty dataset");
  if (config.group_size < 1) throw ContractError("group_size must be >= 1");
  const std::size_t n = data.size();
  std::vector<SigmaAtErrorRate> sig(n);
  std::vector<BoundaryDistanceEstimate> dist(n);
  parallel_for(n, [&](std::size_t i) {
    sig[i] = sigma_at_error_rate(model, data.inputs[i], data.labels[i], config.sigma_search,
                                 derive_seed(config.seed, "sweep-sigma", {i}));
    NearestErrorSearch s = config.distance_search;
    s.pgd_template.seed = derive_seed(config.seed, "sweep-attack", {i});
    dist[i] = nearest_error(model, data.inputs[i], data.labels[i], s);
  });

  SigmaSweepResult out;
  for (std::size_t i = 0; i < n; ++i) {
    out.per_point.add_row({static_cast<std::int64_t>(i), sig[i].sigma_star,
                           static_cast<std::int64_t>(sig[i].converged), dist[i].distance,
                           static_cast<std::int64_t>(dist[i].converged)});
  }
  const double z = gaussian::std_normal_cdf_inv(config.sigma_search.target_mu);
  for (std::size_t g = 0, start = 0; start < n; ++g, start += config.group_size) {
    const std::size_t stop = std::min(n, start + config.group_size);
    std::vector<double> s, d;
    for (std::size_t i = start; i < stop; ++i) {
      s.push_back(sig[i].sigma_star);
      d.push_back(dist[i].distance);
    }
    const double s_med = sample_quantile(s, 0.5);
    out.groups.add_row({static_cast<std::int64_t>(g), static_cast<std::int64_t>(stop - start), s_med,
                        sample_quantile(s, 0.25), sample_quantile(s, 0.75), sample_quantile(d, 0.5),
                        sample_quantile(d, 0.25), sample_quantile(d, 0.75), -s_med * z});
  }
  return out;
}

double median_bound_or_inf(double sigma, double mu) {
  if (mu <= 0.0) return std::numeric_limits<double>::infinity();
  if (mu >= 0.5) return 0.0;
  return gaussian::isoperimetric_median_bound(gaussian::NoiseScale(sigma), gaussian::Probability(mu));
}

Table iso_gap_report(const Classifier& model, const Dataset& data, const IsoConfig& config) {
  if (data.empty()) throw ContractError("iso_gap_report needs a non-empty dataset");
  const std::size_t n = data.size();
  std::vector<NoiseErrorEstimate> rates(n);
  std::vector<double> eps(n);
  parallel_for(n, [&](std::size_t i) {
    rates[i] = estimate_error_rate(model, data.inputs[i], config.sigma, data.labels[i],
                                   config.mc_samples, derive_seed(config.seed, "iso-rate", {i}),
                                   config.clip);
    eps[i] = median_noisy_distance(model, data.inputs[i], config.sigma, data.labels[i],
                                   config.noise_samples, config.search,
                                   derive_seed(config.seed, "iso-median", {i}), config.clip)
                 .eps_star_hat;
  });
  Table t({"point_id", "mu_hat", "ci_low", "ci_high", "eps_star", "bound", "violation"});
  for (std::size_t i = 0; i < n; ++i) {
    const double bound = median_bound_or_inf(config.sigma, rates[i].mu_hat);
    const double conservative = median_bound_or_inf(config.sigma, rates[i].ci_low);
    const bool violation = eps[i] > (1.0 + config.slack) * conservative;
    t.add_row({static_cast<std::int64_t>(i), rates[i].mu_hat, rates[i].ci_low, rates[i].ci_high,
               eps[i], bound, static_cast<std::int64_t>(violation)});
  }
  return t;
}

Table error_rate_cdf(const Classifier& model, const Dataset& data, double sigma,
                     std::int64_t n_samples_per_point, std::uint64_t seed, int n_thresholds,
                     bool clip) {
  if (n_samples_per_point < 1000) throw ContractError("error_rate_cdf needs >= 1000 samples per point");
  if (data.empty()) throw ContractError("error_rate_cdf needs a non-empty dataset");
  if (n_thresholds < 2) throw ContractError("error_rate_cdf needs at least 2 thresholds");
  const std::size_t n = data.size();
  std::vector<double> mu(n);
  parallel_for(n, [&](std::size_t i) {
    mu[i] = estimate_error_rate(model, data.inputs[i], sigma, data.labels[i], n_samples_per_point,
                                derive_seed(seed, "cdf-rate", {i}), clip)
                .mu_hat;
  });
  Table t({"threshold", "fraction"});
  const double lo = std::log10(1.0 / static_cast<double>(n_samples_per_point));
  for (int k = 0; k < n_thresholds; ++k) {
    double threshold = k + 1 == n_thresholds
                           ? 1.0
                           : std::pow(10.0, lo + (0.0 - lo) * k / (n_thresholds - 1));
    if (k == 0) threshold = 1.0 / static_cast<double>(n_samples_per_point);
    const auto count = std::count_if(mu.begin(), mu.end(), [&](double m) { return m >= threshold; });
    t.add_row({threshold, static_cast<double>(count) / static_cast<double>(n)});
  }
  return t;
}

}  // namespace robustlab
