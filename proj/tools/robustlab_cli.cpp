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

// robustlab command-line driver. Links only the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "robustlab/robustlab.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Thrown for invalid combinations the flag parser cannot see.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StatusError : std::runtime_error {
  rl_status status;
  StatusError(rl_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(rl_status s, const char* context) {
  if (s == RL_OK) return;
  std::string msg = std::string(context) + ": " + rl_status_name(s) + ": " + rl_last_error();
  if (s == RL_ERR_PARSE && rl_last_error_offset() >= 0) {
    msg += " (byte offset " + std::to_string(rl_last_error_offset()) + ")";
  }
  throw StatusError(s, msg);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ModelPtr = std::unique_ptr<rl_model, Deleter<rl_model, rl_model_free>>;
using DataPtr = std::unique_ptr<rl_dataset, Deleter<rl_dataset, rl_dataset_free>>;
using TablePtr = std::unique_ptr<rl_table, Deleter<rl_table, rl_table_free>>;
using PcaPtr = std::unique_ptr<rl_pca, Deleter<rl_pca, rl_pca_free>>;
using RasterPtr = std::unique_ptr<rl_raster, Deleter<rl_raster, rl_raster_free>>;
using SeverityPtr = std::unique_ptr<rl_severity, Deleter<rl_severity, rl_severity_free>>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  rl_string_free(s);
  return out;
}

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string clip = "off";
  unsigned threads = 0;
};

struct Common {
  std::string model;
  std::string data;
  std::size_t limit = 0;
};

struct SearchOpts {
  double eps = 1.0;
  int steps = 200;
  std::string norm = "l2";
};

bool clip_on(const Globals& g) { return g.clip == "on"; }

rl_norm parse_norm(const std::string& s) { return s == "linf" ? RL_NORM_LINF : RL_NORM_L2; }

ModelPtr load_model(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  rl_model* m = nullptr;
  check(rl_model_load(path.c_str(), &m), "loading model");
  return ModelPtr(m);
}

// CSV file, or "images.idx,labels.idx".
DataPtr load_data(const std::string& spec, std::size_t limit) {
  if (spec.empty()) throw ConfigError("--data is required");
  rl_dataset* d = nullptr;
  const auto comma = spec.find(',');
  if (comma != std::string::npos) {
    const std::string images = spec.substr(0, comma);
    const std::string labels = spec.substr(comma + 1);
    check(rl_dataset_load_idx(images.c_str(), labels.c_str(), &d), "loading IDX data");
  } else {
    check(rl_dataset_load_csv(spec.c_str(), &d), "loading CSV data");
  }
  DataPtr data(d);
  if (limit > 0 && limit < rl_dataset_size(d)) {
    rl_dataset* s = nullptr;
    check(rl_dataset_slice(d, 0, limit, &s), "slicing data");
    data.reset(s);
  }
  return data;
}

std::string model_hash(const rl_model* m) {
  char buf[17] = {0};
  check(rl_model_hash(m, buf, sizeof buf), "hashing model");
  return buf;
}

rl_search_config make_search(const SearchOpts& o, std::uint64_t seed) {
  rl_search_config c = rl_search_config_default();
  c.eps_hi = o.eps;
  c.pgd.norm = parse_norm(o.norm);
  c.pgd.steps = o.steps;
  c.pgd.seed = seed;
  return c;
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number in ") + flag + ": " + item);
    }
  }
  if (out.empty()) throw ConfigError(std::string(flag) + " needs at least one value");
  return out;
}

// Run state shared between the command bodies and the manifest writer.
struct Run {
  std::string command;
  json outputs = json::array();
  json extra = json::object();
  std::string model_hash;

  fs::path out(const Globals& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    outputs.push_back(name);
    return fs::path(g.out_dir) / name;
  }
};

void write_table(Run& run, const Globals& g, const rl_table* t, const std::string& name) {
  check(rl_table_write_csv(t, run.out(g, name).string().c_str()), "writing table");
}

void write_text(Run& run, const Globals& g, const std::string& name, const std::string& text) {
  std::ofstream f(run.out(g, name), std::ios::binary);
  f << text;
  if (!f) throw StatusError(RL_ERR_IO, "cannot write " + name);
}

json config_echo(const CLI::App& app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "version") continue;
    if (opt->get_type_size() == 0) {
      cfg[name] = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      cfg[name] = opt->as<std::string>();
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

void write_manifest(Run& run, const Globals& g, const CLI::App& app, const CLI::App& sub) {
  json m = json::object();
  m["command"] = run.command;
  m["version"] = rl_version();
  m["seed"] = g.seed;
  json cfg = config_echo(app);
  const json sub_cfg = config_echo(sub);
  for (const auto& [k, v] : sub_cfg.items()) cfg[k] = v;
  m["config"] = cfg;
  m["model_hash"] = run.model_hash.empty() ? json(nullptr) : json(run.model_hash);
  for (auto& [k, v] : run.extra.items()) m[k] = v;
  m["outputs"] = run.outputs;
  std::ofstream f(fs::path(g.out_dir) / "manifest.json", std::ios::binary);
  f << m.dump(2) << "\n";
  if (!f) throw StatusError(RL_ERR_IO, "cannot write manifest.json");
}

// Point source for `slice`: a dataset row index or "adv" for the nearest error of the anchor.
std::vector<double> slice_point(const std::string& which, const rl_dataset* d, const rl_model* m,
                                const std::vector<double>& anchor, int anchor_label,
                                const rl_search_config& search) {
  const int dim = rl_dataset_dim(d);
  std::vector<double> p(static_cast<std::size_t>(dim));
  if (which == "adv") {
    rl_boundary_estimate est{};
    check(rl_nearest_error(m, anchor.data(), anchor.size(), anchor_label, &search, p.data(), &est),
          "nearest error for slice");
    return p;
  }
  std::size_t idx = 0;
  try {
    idx = std::stoul(which);
  } catch (const std::exception&) {
    throw ConfigError("slice point must be a row index or 'adv': " + which);
  }
  if (idx >= rl_dataset_size(d)) throw ConfigError("slice point index out of range: " + which);
  check(rl_dataset_get(d, idx, p.data(), nullptr), "reading slice point");
  return p;
}

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robustlab: adversarial and noise robustness experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(rl_version()));
  app.set_config("--config", "", "key=value configuration file; flags override it");

  Globals g;
  app.add_option("--seed", g.seed, "global seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--clip", g.clip, "clip noisy inputs to [0,1]")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->capture_default_str();

  Common c;
  SearchOpts so;
  auto add_common = [&](CLI::App* sub, bool need_model) {
    auto* mo = sub->add_option("--model", c.model, "model file");
    if (need_model) mo->required();
    sub->add_option("--data", c.data, "CSV file or images.idx,labels.idx")->required();
    sub->add_option("--limit", c.limit, "use only the first N rows (0 = all)")->capture_default_str();
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--eps", so.eps, "largest radius searched")->capture_default_str();
    sub->add_option("--steps", so.steps, "PGD steps")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--norm", so.norm, "threat model norm")
        ->check(CLI::IsMember({"l2", "linf"}))
        ->capture_default_str();
  };

  Run run;
  std::map<const CLI::App*, std::function<void()>> actions;

  // ---- synth
  std::string synth_kind = "desk";
  std::string synth_out;
  int synth_classes = 2, synth_per_class = 200, synth_dim = 16;
  double synth_scale = 1.0, synth_spread = 0.1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset as CSV");
  synth->add_option("--kind", synth_kind)->check(CLI::IsMember({"desk", "blobs"}))->capture_default_str();
  synth->add_option("--out", synth_out, "output CSV path")->required();
  synth->add_option("--classes", synth_classes)->capture_default_str();
  synth->add_option("--per-class", synth_per_class)->capture_default_str();
  synth->add_option("--dim", synth_dim, "blobs only")->capture_default_str();
  synth->add_option("--scale", synth_scale, "blobs only")->capture_default_str();
  synth->add_option("--spread", synth_spread, "blobs only")->capture_default_str();
  actions[synth] = [&] {
    rl_dataset* d = nullptr;
    if (synth_kind == "desk") {
      rl_desk_spec spec = rl_desk_spec_default();
      spec.n_classes = synth_classes;
      spec.n_per_class = synth_per_class;
      spec.seed = g.seed;
      check(rl_dataset_synth_desk(&spec, &d), "synth desk");
    } else {
      check(rl_dataset_synth_blobs(synth_classes, synth_per_class, synth_dim, synth_scale, synth_spread,
                                   g.seed, &d),
            "synth blobs");
    }
    DataPtr data(d);
    check(rl_dataset_save_csv(d, synth_out.c_str()), "writing dataset");
    run.outputs.push_back(synth_out);
  };

  // ---- train
  std::string hidden_str;
  std::string test_data;
  double test_sigma = 0.0;
  int test_draws = 1;
  rl_train_config tc = rl_train_config_default();
  std::string decay_str;
  auto* train = app.add_subcommand("train", "train a linear model or MLP");
  add_common(train, false);
  train->add_option("--hidden", hidden_str, "comma-separated hidden widths (empty = linear)");
  train->add_option("--epochs", tc.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--batch", tc.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--lr", tc.learning_rate)->capture_default_str();
  train->add_option("--weight-decay", tc.weight_decay)->capture_default_str();
  train->add_option("--momentum", tc.momentum)->capture_default_str();
  train->add_option("--augment-sigma", tc.augment_sigma_max, "Gaussian augmentation sigma_max")
      ->capture_default_str();
  train->add_option("--lr-decay", decay_str, "epoch:factor pairs, comma-separated");
  train->add_option("--test", test_data, "held-out data for final accuracy");
  train->add_option("--sigma", test_sigma, "noise sigma for held-out accuracy")->capture_default_str();
  train->add_option("--draws", test_draws, "noise draws per held-out point")->capture_default_str();
  actions[train] = [&] {
    DataPtr d = load_data(c.data, c.limit);
    std::vector<int> hidden;
    for (double w : hidden_str.empty() ? std::vector<double>{} : parse_list(hidden_str, "--hidden")) {
      if (w < 1 || w != static_cast<int>(w)) throw ConfigError("--hidden widths must be positive integers");
      hidden.push_back(static_cast<int>(w));
    }
    std::vector<int> decay_epochs;
    std::vector<double> decay_factors;
    std::stringstream ss(decay_str);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("--lr-decay entries look like epoch:factor");
      try {
        decay_epochs.push_back(std::stoi(item.substr(0, colon)));
        decay_factors.push_back(std::stod(item.substr(colon + 1)));
      } catch (const std::exception&) {
        throw ConfigError("bad --lr-decay entry: " + item);
      }
    }
    tc.seed = g.seed;
    tc.clip_augmented = clip_on(g) ? 1 : 0;
    tc.decay_epochs = decay_epochs.data();
    tc.decay_factors = decay_factors.data();
    tc.n_decays = decay_epochs.size();
    rl_model* m = nullptr;
    char* report = nullptr;
    if (!test_data.empty()) {
      DataPtr t = load_data(test_data, 0);
      check(rl_train_with_test(d.get(), t.get(), hidden.data(), hidden.size(), &tc, test_sigma, test_draws,
                               &m, &report),
            "training");
    } else {
      check(rl_train(d.get(), hidden.data(), hidden.size(), &tc, &m, &report), "training");
    }
    ModelPtr model(m);
    const std::string report_text = take_string(report);
    const std::string path = c.model.empty() ? (fs::path(g.out_dir) / "model.isrb").string() : c.model;
    if (!fs::path(path).parent_path().empty()) fs::create_directories(fs::path(path).parent_path());
    check(rl_model_save(m, path.c_str()), "saving model");
    run.outputs.push_back(path);
    write_text(run, g, "train_report.json", report_text + "\n");
    run.model_hash = model_hash(m);
  };

  // ---- eval
  double eval_sigma = 0.0;
  int eval_draws = 1;
  auto* eval = app.add_subcommand("eval", "clean or Gaussian-noise accuracy");
  add_common(eval, true);
  eval->add_option("--sigma", eval_sigma)->capture_default_str();
  eval->add_option("--draws", eval_draws)->check(CLI::PositiveNumber)->capture_default_str();
  actions[eval] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    double acc = 0.0;
    check(rl_evaluate(m.get(), d.get(), eval_sigma, eval_draws, g.seed, clip_on(g) ? 1 : 0, &acc), "evaluate");
    json r = {{"sigma", eval_sigma}, {"draws", eval_draws}, {"n", rl_dataset_size(d.get())}, {"accuracy", acc}};
    write_text(run, g, "eval.json", r.dump(2) + "\n");
    std::printf("accuracy %.6f\n", acc);
  };

  // ---- attack
  auto* attack = app.add_subcommand("attack", "nearest-error distance per point");
  add_common(attack, true);
  add_search(attack);
  actions[attack] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    const rl_search_config s = make_search(so, g.seed);
    rl_table* t = nullptr;
    check(rl_nearest_error_batch(m.get(), d.get(), &s, &t), "attack");
    TablePtr table(t);
    write_table(run, g, t, "attack.csv");
  };

  // ---- curve
  std::string curve_eps = "0,0.05,0.1,0.2,0.3,0.5";
  auto* curve = app.add_subcommand("curve", "adversarial accuracy over an epsilon grid");
  add_common(curve, true);
  curve->add_option("--eps", curve_eps, "comma-separated radii")->capture_default_str();
  curve->add_option("--steps", so.steps)->check(CLI::PositiveNumber)->capture_default_str();
  curve->add_option("--norm", so.norm)->check(CLI::IsMember({"l2", "linf"}))->capture_default_str();
  actions[curve] = [&] {
    const std::vector<double> eps = parse_list(curve_eps, "--eps");
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    rl_pgd_config p = rl_pgd_config_default(eps.back());
    p.norm = parse_norm(so.norm);
    p.steps = so.steps;
    p.seed = g.seed;
    rl_table* t = nullptr;
    check(rl_robustness_curve(m.get(), d.get(), eps.data(), eps.size(), &p, &t), "robustness curve");
    TablePtr table(t);
    write_table(run, g, t, "curve.csv");
  };

  // ---- sigma-sweep
  rl_sigma_search ss_cfg = rl_sigma_search_default();
  std::size_t group_size = 25;
  auto* sweep = app.add_subcommand("sigma-sweep", "noise level at a target error rate vs. nearest-error distance");
  add_common(sweep, true);
  add_search(sweep);
  sweep->add_option("--mu", ss_cfg.target_mu, "target error rate in noise")->capture_default_str();
  sweep->add_option("--samples", ss_cfg.mc_samples, "Monte Carlo samples per evaluation")->capture_default_str();
  sweep->add_option("--group-size", group_size)->check(CLI::PositiveNumber)->capture_default_str();
  actions[sweep] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    ss_cfg.clip = clip_on(g) ? 1 : 0;
    const rl_search_config s = make_search(so, g.seed);
    rl_table* pp = nullptr;
    rl_table* gr = nullptr;
    check(rl_sigma_sweep(m.get(), d.get(), group_size, &ss_cfg, &s, g.seed, &pp, &gr), "sigma sweep");
    TablePtr per_point(pp), groups(gr);
    write_table(run, g, pp, "sigma_sweep_points.csv");
    write_table(run, g, gr, "sigma_sweep_groups.csv");
  };

  // ---- iso
  double iso_sigma = 0.1;
  std::int64_t iso_mc = 10000, iso_noise = 1000;
  double iso_slack = 0.05;
  auto* iso = app.add_subcommand("iso", "median noisy distance against the isoperimetric bound");
  add_common(iso, true);
  add_search(iso);
  iso->add_option("--sigma", iso_sigma)->capture_default_str();
  iso->add_option("--samples", iso_mc, "Monte Carlo samples for the error rate")->capture_default_str();
  iso->add_option("--noise-samples", iso_noise, "noisy copies searched per point")->capture_default_str();
  iso->add_option("--slack", iso_slack, "relative tolerance before flagging")->capture_default_str();
  actions[iso] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    const rl_search_config s = make_search(so, g.seed);
    rl_table* t = nullptr;
    check(rl_iso_gap_report(m.get(), d.get(), iso_sigma, iso_mc, iso_noise, &s, iso_slack, g.seed,
                            clip_on(g) ? 1 : 0, &t),
          "iso report");
    TablePtr table(t);
    write_table(run, g, t, "iso.csv");
    std::size_t violations = 0;
    for (std::size_t r = 0; r < rl_table_rows(t); ++r) {
      double v = 0.0;
      check(rl_table_get_by_name(t, r, "violation", &v), "reading iso table");
      violations += v != 0.0;
    }
    run.extra["violations"] = violations;
    run.extra["points"] = rl_table_rows(t);
  };

  // ---- cdf
  double cdf_sigma = 0.1;
  std::int64_t cdf_samples = 1000;
  int cdf_thresholds = 41;
  auto* cdf = app.add_subcommand("cdf", "distribution of per-point error rates in noise");
  add_common(cdf, true);
  cdf->add_option("--sigma", cdf_sigma)->capture_default_str();
  cdf->add_option("--samples", cdf_samples, "noise samples per point")->capture_default_str();
  cdf->add_option("--thresholds", cdf_thresholds)->capture_default_str();
  actions[cdf] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    rl_table* t = nullptr;
    check(rl_error_rate_cdf(m.get(), d.get(), cdf_sigma, cdf_samples, cdf_thresholds, g.seed,
                            clip_on(g) ? 1 : 0, &t),
          "error-rate cdf");
    TablePtr table(t);
    write_table(run, g, t, "cdf.csv");
  };

  // ---- slice
  std::size_t anchor_idx = 0;
  std::string p1_str = "adv", p2_str = "1";
  rl_slice_spec slice_spec{0.0, 201, 0.0, 0.0};
  std::string slice_prefix = "slice";
  auto* slice = app.add_subcommand("slice", "render a two-dimensional decision slice");
  add_common(slice, true);
  add_search(slice);
  slice->add_option("--anchor", anchor_idx, "row index of the anchor")->capture_default_str();
  slice->add_option("--p1", p1_str, "row index or 'adv'")->capture_default_str();
  slice->add_option("--p2", p2_str, "row index or 'adv'")->capture_default_str();
  slice->add_option("--half-extent", slice_spec.half_extent, "0 = 1.5x the farthest marker")
      ->capture_default_str();
  slice->add_option("--resolution", slice_spec.resolution)->capture_default_str();
  slice->add_option("--circle", slice_spec.circle_radius, "circle radius (0 = none)")->capture_default_str();
  slice->add_option("--linf", slice_spec.linf_radius, "L-infinity ball radius (0 = none)")
      ->capture_default_str();
  slice->add_option("--name", slice_prefix, "output file stem")->capture_default_str();
  actions[slice] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    if (anchor_idx >= rl_dataset_size(d.get())) throw ConfigError("--anchor out of range");
    std::vector<double> anchor(static_cast<std::size_t>(rl_dataset_dim(d.get())));
    int label = 0;
    check(rl_dataset_get(d.get(), anchor_idx, anchor.data(), &label), "reading anchor");
    const rl_search_config s = make_search(so, g.seed);
    const std::vector<double> p1 = slice_point(p1_str, d.get(), m.get(), anchor, label, s);
    const std::vector<double> p2 = slice_point(p2_str, d.get(), m.get(), anchor, label, s);
    rl_slice_spec spec = slice_spec;
    if (spec.half_extent <= 0.0) {
      spec.half_extent = 1.5 * std::max(l2_distance(anchor, p1), l2_distance(anchor, p2));
    }
    rl_raster* r = nullptr;
    check(rl_slice_rasterize(m.get(), anchor.data(), p1.data(), p2.data(), anchor.size(), &spec, &r), "slice");
    RasterPtr raster(r);
    fs::create_directories(g.out_dir);
    const std::string prefix = (fs::path(g.out_dir) / slice_prefix).string();
    check(rl_raster_export(r, prefix.c_str()), "exporting slice");
    for (const char* ext : {".ppm", ".csv", ".json"}) run.outputs.push_back(slice_prefix + ext);
  };

  // ---- corrupt
  std::string severity_file;
  std::string kinds;
  int pca_k = 0;
  bool omit_gaussian = false;
  auto* corrupt = app.add_subcommand("corrupt", "accuracy under the corruption suite");
  add_common(corrupt, true);
  corrupt->add_option("--severity-file", severity_file, "severity table (default: built-in)");
  corrupt->add_option("--kinds", kinds, "comma-separated corruption names (default: all that apply)");
  corrupt->add_option("--pca-k", pca_k, "fit a k-component basis for pca_noise (0 = skip)")
      ->capture_default_str();
  corrupt->add_flag("--omit-gaussian", omit_gaussian, "drop gaussian_noise from the mean");
  actions[corrupt] = [&] {
    ModelPtr m = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(m.get());
    rl_severity* sv = nullptr;
    const std::string sev_path =
        severity_file.empty() ? std::string(ROBUSTLAB_DEFAULT_SEVERITY_FILE) : severity_file;
    check(rl_severity_load(fs::exists(sev_path) || !severity_file.empty() ? sev_path.c_str() : nullptr, &sv),
          "loading severity table");
    SeverityPtr sev(sv);
    PcaPtr basis;
    if (pca_k > 0) {
      rl_pca* p = nullptr;
      check(rl_pca_fit(d.get(), pca_k, g.seed, &p), "fitting PCA");
      basis.reset(p);
    }
    rl_table* t = nullptr;
    char* summary = nullptr;
    check(rl_evaluate_suite(m.get(), d.get(), kinds.empty() ? nullptr : kinds.c_str(), sv, basis.get(), g.seed,
                            omit_gaussian ? 1 : 0, &t, &summary),
          "corruption suite");
    TablePtr table(t);
    const std::string summary_text = take_string(summary);
    write_table(run, g, t, "corrupt.csv");
    write_text(run, g, "corrupt_summary.json", summary_text + "\n");
  };

  // ---- defense-check
  std::string defended_path;
  int bits = 8;
  bool masked = false;
  std::string def_sigmas = "0.05,0.1,0.2";
  int trials = 10;
  double threshold = 0.02;
  auto* defense = app.add_subcommand("defense-check", "noise accuracy of a defended model vs. its base");
  add_common(defense, true);
  defense->add_option("--defended", defended_path, "defended model file (default: bitdepth wrapper)");
  defense->add_option("--bits", bits, "bit depth of the default wrapper")->check(CLI::Range(1, 8))
      ->capture_default_str();
  defense->add_flag("--masked-gradient", masked, "zero gradient through the wrapper");
  defense->add_option("--sigmas", def_sigmas)->capture_default_str();
  defense->add_option("--trials", trials)->capture_default_str();
  defense->add_option("--threshold", threshold)->capture_default_str();
  actions[defense] = [&] {
    const std::vector<double> sigmas = parse_list(def_sigmas, "--sigmas");
    ModelPtr base = load_model(c.model);
    DataPtr d = load_data(c.data, c.limit);
    run.model_hash = model_hash(base.get());
    ModelPtr defended;
    if (defended_path.empty()) {
      rl_model* w = nullptr;
      check(rl_model_bitdepth_wrap(base.get(), bits, masked ? 1 : 0, &w), "wrapping model");
      defended.reset(w);
    } else {
      defended = load_model(defended_path);
    }
    run.extra["defended_hash"] = model_hash(defended.get());
    rl_table* t = nullptr;
    int no_improvement = 0;
    check(rl_defense_sanity_check(base.get(), defended.get(), d.get(), sigmas.data(), sigmas.size(), trials,
                                  g.seed, threshold, &t, &no_improvement),
          "defense check");
    TablePtr table(t);
    write_table(run, g, t, "defense.csv");
    run.extra["verdict"] = no_improvement ? "no-improvement" : "improvement";
    std::printf("verdict %s\n", no_improvement ? "no-improvement" : "improvement");
  };

  // ---- optimal-curves
  std::string oc_sigmas = "0.1";
  std::string oc_mus = "0.01";
  auto* optimal = app.add_subcommand("optimal-curves", "half-space distance -sigma*Phi^-1(mu) over a grid");
  optimal->add_option("--sigmas", oc_sigmas)->capture_default_str();
  optimal->add_option("--mus", oc_mus)->capture_default_str();
  actions[optimal] = [&] {
    const std::vector<double> sigmas = parse_list(oc_sigmas, "--sigmas");
    const std::vector<double> mus = parse_list(oc_mus, "--mus");
    rl_table* t = nullptr;
    check(rl_optimal_curve_table(sigmas.data(), sigmas.size(), mus.data(), mus.size(), &t), "optimal curves");
    TablePtr table(t);
    write_table(run, g, t, "optimal_curves.csv");
    char* text = nullptr;
    check(rl_table_to_csv(t, &text), "formatting table");
    std::fputs(take_string(text).c_str(), stdout);
  };

  try {
    app.parse(argc, argv);
    const CLI::App* chosen = app.get_subcommands().front();
    run.command = chosen->get_name();
    rl_set_num_threads(g.threads);
    actions.at(chosen)();
    if (run.command != "synth") write_manifest(run, g, app, *chosen);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const StatusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.status == RL_ERR_CONTRACT || e.status == RL_ERR_DOMAIN) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
