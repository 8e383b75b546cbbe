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

#include "core/attacks.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace robustlab {

double norm_of(const Vector& v, Norm norm) {
  return norm == Norm::kL2 ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

PgdConfig PgdConfig::standard(Norm norm, double epsilon) {
  PgdConfig c;
  c.norm = norm;
  c.epsilon = epsilon;
  c.steps = 100;
  c.step_size = epsilon / 25.0;
  return c;
}

void PgdConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ContractError("pgd epsilon must be positive");
  if (steps < 1) throw ContractError("pgd steps must be >= 1");
  if (!(step_size > 0.0)) throw ContractError("pgd step_size must be positive");
  if (step_size > epsilon * (1.0 + 1e-12)) throw ContractError("pgd step_size must not exceed epsilon");
}

PgdConfig PgdConfig::rescaled(double new_epsilon) const {
  PgdConfig c = *this;
  c.step_size = step_size / epsilon * new_epsilon;
  c.epsilon = new_epsilon;
  return c;
}

void NearestErrorSearch::validate() const {
  if (!(eps_lo >= 0.0) || !(eps_lo < eps_hi)) throw ContractError("nearest_error needs 0 <= eps_lo < eps_hi");
  if (bisection_iters < 0 || refine_halvings < 0) throw ContractError("iteration counts must be >= 0");
  pgd_template.validate();
}

namespace {

void project(Vector& delta, Norm norm, double eps) {
  if (norm == Norm::kL2) {
    const double n = delta.norm();
    if (n > eps) delta *= eps / n;
  } else {
    delta = delta.cwiseMax(-eps).cwiseMin(eps);
  }
}

bool is_success(int predicted, int label, const std::optional<int>& target) {
  return target ? predicted == *target : predicted != label;
}

// Lower is better for the attacker.
double attack_objective(const Vector& z, int label, const std::optional<int>& target) {
  return target ? -margin_of(z, *target) : margin_of(z, label);
}

Vector random_ball_point(int n, Norm norm, double eps, RngStream& rng) {
  Vector v(n);
  if (norm == Norm::kLinf) {
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(-eps, eps);
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  const double r = eps * std::pow(rng.uniform(), 1.0 / n);
  const double len = v.norm();
  return len > 0 ? Vector(v * (r / len)) : Vector(Vector::Zero(n));
}

}  // namespace

AttackResult pgd(const Classifier& model, const Vector& x, int label, const PgdConfig& config,
                 const std::optional<Vector>& start) {
  config.validate();
  if (x.size() != model.input_dim()) throw ContractError("pgd input dimension does not match model");
  if (label < 0 || label >= model.num_classes()) throw ContractError("pgd label out of range");
  if (config.target && (*config.target < 0 || *config.target >= model.num_classes() ||
                        *config.target == label)) {
    throw ContractError("pgd target must be a valid class different from the label");
  }

  AttackResult result;
  const Vector z0 = model.logits(x);
  const int clean_pred = argmax_lowest(z0);
  if (!config.target && clean_pred != label) {
    result.adversarial_point = x;
    result.success = true;
    result.distance = 0.0;
    result.predicted = clean_pred;
    return result;
  }

  Vector delta = Vector::Zero(x.size());
  if (start) {
    if (start->size() != x.size()) throw ContractError("pgd warm start has the wrong dimension");
    delta = *start - x;
  } else if (config.random_start) {
    RngStream rng(config.seed, "pgd-start");
    delta = random_ball_point(static_cast<int>(x.size()), config.norm, config.epsilon, rng);
  }
  project(delta, config.norm, config.epsilon);

  const int attacked = config.target ? *config.target : label;
  // Untargeted: descend the label margin. Targeted: ascend the target margin.
  const double direction = config.target ? 1.0 : -1.0;

  bool have_best = false;
  double best_objective = 0.0;
  Vector best_delta;
  int best_pred = clean_pred;
  Vector current = x + delta;
  Vector z = model.logits(current);

  auto consider = [&](const Vector& logits_now) {
    const int pred = argmax_lowest(logits_now);
    if (!is_success(pred, label, config.target)) return false;
    const double obj = attack_objective(logits_now, label, config.target);
    if (!have_best || obj < best_objective) {
      have_best = true;
      best_objective = obj;
      best_delta = delta;
      best_pred = pred;
    }
    return true;
  };

  bool done = consider(z) && config.stop_on_success;
  for (int step = 0; step < config.steps && !done; ++step) {
    const Vector g = model.input_gradient(current, attacked, Loss::kMargin);
    if (!g.allFinite()) {
      throw NumericalError("non-finite input gradient at pgd step " + std::to_string(step));
    }
    if (config.norm == Norm::kL2) {
      const double gn = g.norm();
      if (gn > 0.0) delta += direction * config.step_size * g / gn;
    } else {
      delta += direction * config.step_size * g.cwiseSign();
    }
    project(delta, config.norm, config.epsilon);
    current = x + delta;
    z = model.logits(current);
    done = consider(z) && config.stop_on_success;
  }

  if (have_best) {
    result.adversarial_point = x + best_delta;
    result.success = true;
    result.predicted = best_pred;
    result.distance = norm_of(best_delta, config.norm);
  } else {
    result.adversarial_point = current;
    result.success = false;
    result.predicted = argmax_lowest(z);
    result.distance = norm_of(delta, config.norm);
  }
  return result;
}

BoundaryDistanceEstimate nearest_error(const Classifier& model, const Vector& x, int label,
                                       const NearestErrorSearch& search) {
  search.validate();
  BoundaryDistanceEstimate est;
  if (model.predict(x) != label) {
    est.distance = 0.0;
    est.witness = x;
    est.last_correct = x;
    est.converged = true;
    return est;
  }

  PgdConfig base = search.pgd_template;
  base.target.reset();
  base.stop_on_success = true;

  AttackResult at_hi = pgd(model, x, label, base.rescaled(search.eps_hi));
  if (!at_hi.success) {
    est.distance = search.eps_hi;
    est.witness = at_hi.adversarial_point;
    est.last_correct = at_hi.adversarial_point;
    est.converged = false;
    return est;
  }

  Vector best = at_hi.adversarial_point;
  double best_len = (best - x).norm();
  double lo = search.eps_lo;
  double hi = search.eps_hi;
  for (int it = 0; it < search.bisection_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > 0.0)) break;
    AttackResult r = pgd(model, x, label, base.rescaled(mid));
    if (r.success) {
      hi = mid;
      const double len = (r.adversarial_point - x).norm();
      if (len < best_len) {
        best = r.adversarial_point;
        best_len = len;
      }
    } else {
      lo = mid;
    }
  }

  // Boundary crossing on the segment x + t (best - x), t in [0, 1].
  const Vector dir = best - x;
  double t_lo = 0.0;
  double t_hi = 1.0;
  for (int it = 0; it < search.refine_halvings; ++it) {
    const double t = 0.5 * (t_lo + t_hi);
    if (model.predict(x + t * dir) != label) {
      t_hi = t;
    } else {
      t_lo = t;
    }
  }
  est.witness = x + t_hi * dir;
  est.last_correct = x + t_lo * dir;
  est.distance = (est.witness - x).norm();
  est.converged = true;
  return est;
}

Table nearest_error_batch(const Classifier& model, const Dataset& data,
                          const NearestErrorSearch& search) {
  std::vector<BoundaryDistanceEstimate> results(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    NearestErrorSearch s = search;
    s.pgd_template.seed = derive_seed(search.pgd_template.seed, "nearest-error", {i});
    results[i] = nearest_error(model, data.inputs[i], data.labels[i], s);
  });
  Table t({"point_id", "distance", "converged"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    t.add_row({static_cast<std::int64_t>(i), results[i].distance,
               static_cast<std::int64_t>(results[i].converged ? 1 : 0)});
  }
  return t;
}

Table robustness_curve(const Classifier& model, const Dataset& data,
                       std::span<const double> eps_grid, const PgdConfig& config_template) {
  if (data.empty()) throw ContractError("robustness_curve needs a non-empty dataset");
  if (eps_grid.empty()) throw ContractError("robustness_curve needs a non-empty epsilon grid");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] >= 0.0) || (k > 0 && eps_grid[k] < eps_grid[k - 1])) {
      throw ContractError("epsilon grid must be non-negative and ascending");
    }
  }
  config_template.validate();
  const std::size_t n_eps = eps_grid.size();
  // survived[i][k]: point i withstands the attack at eps_grid[k].
  std::vector<std::vector<char>> survived(data.size(), std::vector<char>(n_eps, 0));
  parallel_for(data.size(), [&](std::size_t i) {
    const Vector& x = data.inputs[i];
    const int label = data.labels[i];
    const bool clean_ok = model.predict(x) == label;
    std::optional<Vector> warm;
    bool broken = !clean_ok;
    for (std::size_t k = 0; k < n_eps && !broken; ++k) {
      const double eps = eps_grid[k];
      if (eps == 0.0) {
        survived[i][k] = 1;
        continue;
      }
      PgdConfig c = config_template.rescaled(eps);
      c.target.reset();
      c.seed = derive_seed(config_template.seed, "curve", {i, k});
      AttackResult r = pgd(model, x, label, c, warm);
      if (r.success) {
        broken = true;
      } else {
        survived[i][k] = 1;
        warm = r.adversarial_point;
      }
    }
  });
  Table t({"epsilon", "adversarial_accuracy"});
  for (std::size_t k = 0; k < n_eps; ++k) {
    std::size_t ok = 0;
    for (const auto& row : survived) ok += row[k] ? 1 : 0;
    t.add_row({eps_grid[k], static_cast<double>(ok) / static_cast<double>(data.size())});
  }
  return t;
}

}  // namespace robustlab
