// Copyright 2026 The SmoothMix Authors
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

#include "smoothmix_tools/commands.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "smoothmix/adversary.hpp"
#include "smoothmix/checkpoint.hpp"
#include "smoothmix/errors.hpp"
#include "smoothmix/evaluation.hpp"
#include "smoothmix/rng.hpp"
#include "smoothmix/smoothing.hpp"
#include "smoothmix/theory.hpp"
#include "smoothmix_tools/csv.hpp"

#ifndef SMOOTHMIX_VERSION
#define SMOOTHMIX_VERSION "0.0.0"
#endif

namespace smoothmix::tools {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string version_string() { return SMOOTHMIX_VERSION; }

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "seed",
      "data.kind", "data.train_size", "data.test_size", "data.seed", "data.noise",
      "data.centers", "data.spread", "data.images", "data.labels",
      "model.hidden", "model.checkpoint",
      "method", "sigma", "m", "eta", "attack.alpha", "attack.steps", "attack.epsilon_cap",
      "one_step", "one_step_cap", "adv.epsilon", "adv.steps", "adv.warmup_epochs",
      "train.epochs", "train.batch_size", "train.lr", "train.lr_milestones", "train.lr_gamma",
      "train.momentum", "train.weight_decay",
      "certify.sigma", "certify.n0", "certify.n", "certify.alpha", "certify.points",
      "evaluate.inputs", "evaluate.names", "evaluate.radii",
      "demo.points", "demo.eps_grid", "demo.pgd_steps", "demo.conf_m", "demo.conf_points",
      "mixratio.points", "mixratio.sigma", "mixratio.pgd_steps", "mixratio.pgd_eps",
      "mixratio.m",
      "theory.sigma", "theory.tau", "theory.epsilon", "theory.p", "theory.families",
      "theory.dims", "theory.trials", "theory.chunk", "theory.direction",
  };
  return keys;
}

namespace {

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
  return buf.data();
}

std::string fixed2(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

int to_int(std::int64_t v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string("config key '") + key + "' is out of range");
  }
  return static_cast<int>(v);
}

double seconds_since(Clock::time_point start, const RunOptions& opts) {
  if (!opts.timings) return 0.0;
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Manifest start_manifest(const std::string& command, const FlatConfig& cfg, std::uint64_t seed) {
  Manifest m;
  m.command = command;
  m.version = version_string();
  m.seed = seed;
  m.config = cfg.entries();
  m.config["seed"] = std::to_string(seed);
  std::string snapshot = command;
  for (const auto& [k, v] : m.config) snapshot += "\n" + k + "=" + v;
  m.run_id = command + "-" + hex64(fnv1a64(snapshot));
  return m;
}

ModelParams load_model(const FlatConfig& cfg, const RunOptions& opts) {
  const fs::path path = cfg.has("model.checkpoint") ? cfg.get_path("model.checkpoint")
                                                    : opts.out / "checkpoint.bin";
  if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path.string());
  return load_checkpoint(path);
}

int point_limit(const FlatConfig& cfg, const std::string& key, int available, int fallback) {
  const int wanted = to_int(cfg.get_int(key, fallback), key.c_str());
  if (wanted < 0) throw ConfigError("config key '" + key + "' must be >= 0");
  return wanted == 0 ? available : std::min(wanted, available);
}

}  // namespace

std::string Manifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["run_id"] = run_id;
  j["version"] = version;
  j["seed"] = seed;
  j["config"] = config;
  j["artifacts"] = artifacts;
  j["timings"] = timings;
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

// ---- config decoding ------------------------------------------------------------

std::pair<Dataset, Dataset> load_splits(const FlatConfig& cfg, std::uint64_t seed) {
  const std::string kind = cfg.get_string("data.kind", "two_moons");
  const int train_size = to_int(cfg.get_int("data.train_size", 2000), "data.train_size");
  const int test_size = to_int(cfg.get_int("data.test_size", 500), "data.test_size");
  if (train_size < 1 || test_size < 0) throw ConfigError("data: sizes must be positive");
  const std::uint64_t data_seed = cfg.get_uint("data.seed", seed);
  Dataset all;
  if (kind == "two_moons") {
    const double noise = cfg.get_double("data.noise", 0.1);
    if (!(noise >= 0.0)) throw ConfigError("data.noise must be >= 0");
    all = gen_two_moons(train_size + test_size, noise, data_seed);
  } else if (kind == "blobs") {
    std::vector<Vector> centers;
    // "x,y; x,y; ..." with one center per ';' group.
    std::stringstream groups(cfg.get_string("data.centers", "-2,0;2,0"));
    std::string group;
    while (std::getline(groups, group, ';')) {
      std::vector<double> coords;
      std::stringstream items(group);
      std::string item;
      while (std::getline(items, item, ',')) {
        try {
          coords.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw ConfigError("data.centers: bad coordinate '" + item + "'");
        }
      }
      centers.push_back(Eigen::Map<Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
    if (centers.size() < 2) throw ConfigError("data.centers needs at least two centers");
    for (const auto& c : centers) {
      if (c.size() != centers.front().size()) throw ConfigError("data.centers: ragged dimensions");
    }
    all = gen_gaussian_blobs(train_size + test_size, centers, cfg.get_double("data.spread", 0.5),
                             data_seed);
  } else if (kind == "mnist") {
    const fs::path images = cfg.get_path("data.images");
    const fs::path labels = cfg.get_path("data.labels");
    if (!fs::exists(images) || !fs::exists(labels)) {
      throw ConfigError("MNIST files not found: " + images.string() + ", " + labels.string());
    }
    all = load_mnist_idx(images, labels, 0, data_seed);
  } else {
    throw ConfigError("unknown data.kind '" + kind + "' (expected two_moons, blobs or mnist)");
  }
  if (train_size + test_size > all.size()) {
    throw ConfigError("data: train_size + test_size exceeds the available examples");
  }
  return stratified_split(all, train_size, test_size, data_seed);
}

TrainRunConfig train_run_config(const FlatConfig& cfg, std::uint64_t seed) {
  TrainRunConfig run;
  run.epochs = to_int(cfg.get_int("train.epochs", run.epochs), "train.epochs");
  run.batch_size = to_int(cfg.get_int("train.batch_size", run.batch_size), "train.batch_size");
  run.lr = cfg.get_double("train.lr", run.lr);
  run.lr_milestones = cfg.get_ints("train.lr_milestones", {});
  run.lr_gamma = cfg.get_double("train.lr_gamma", run.lr_gamma);
  run.momentum = cfg.get_double("train.momentum", run.momentum);
  run.weight_decay = cfg.get_double("train.weight_decay", run.weight_decay);
  run.hidden = cfg.get_ints("model.hidden", run.hidden);
  run.seed = seed;
  run.validate();
  return run;
}

MethodConfig method_config(const FlatConfig& cfg) {
  MethodConfig mc;
  mc.method = parse_train_method(cfg.get_string("method", "gaussian"));
  mc.sigma = cfg.get_double("sigma", mc.sigma);
  mc.m = to_int(cfg.get_int("m", mc.m), "m");
  mc.eta = cfg.get_double("eta", mc.eta);
  mc.attack.alpha_step = cfg.get_double("attack.alpha", mc.attack.alpha_step);
  mc.attack.steps = to_int(cfg.get_int("attack.steps", mc.attack.steps), "attack.steps");
  mc.attack.epsilon_cap = cfg.get_optional_double("attack.epsilon_cap");
  mc.use_one_step = cfg.get_bool("one_step", false);
  mc.one_step_cap = cfg.get_optional_double("one_step_cap");
  mc.adv_epsilon = cfg.get_double("adv.epsilon", mc.adv_epsilon);
  mc.adv_steps = to_int(cfg.get_int("adv.steps", mc.adv_steps), "adv.steps");
  mc.adv_warmup_epochs =
      to_int(cfg.get_int("adv.warmup_epochs", mc.adv_warmup_epochs), "adv.warmup_epochs");
  mc.validate();
  return mc;
}

// ---- subcommands ----------------------------------------------------------------

Manifest cmd_train(const FlatConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  const TrainRunConfig run = train_run_config(cfg, seed);
  const MethodConfig method = method_config(cfg);
  auto [train_set, test_set] = load_splits(cfg, seed);

  Manifest m = start_manifest("train", cfg, seed);
  const TrainResult result = train(train_set, run, method);
  save_checkpoint(opts.out / "checkpoint.bin", result.params);
  {
    CsvWriter log(opts.out / "train_log.csv", {"epoch", "loss_nat", "loss_mix", "lr", "seconds"});
    for (const auto& e : result.log) {
      log.row({std::to_string(e.epoch), format_double(e.loss_nat), format_double(e.loss_mix),
               format_double(e.lr), format_double(opts.timings ? e.seconds : 0.0)});
    }
  }
  m.artifacts["checkpoint"] = "checkpoint.bin";
  m.artifacts["train_log"] = "train_log.csv";
  m.summary["method"] = std::string(train_method_name(method.method));
  m.summary["train_accuracy"] = format_double(clean_accuracy(result.params, train_set));
  m.summary["test_accuracy"] = format_double(clean_accuracy(result.params, test_set));
  m.timings["total_seconds"] = seconds_since(start, opts);
  return m;
}

Manifest cmd_certify(const FlatConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  SmoothingConfig sc;
  sc.sigma = cfg.get_double("certify.sigma", cfg.get_double("sigma", sc.sigma));
  sc.n0 = cfg.get_int("certify.n0", sc.n0);
  sc.n = cfg.get_int("certify.n", sc.n);
  sc.alpha_cert = cfg.get_double("certify.alpha", sc.alpha_cert);
  sc.validate();
  const ModelParams params = load_model(cfg, opts);
  const Dataset test = load_splits(cfg, seed).second;
  if (params.input_dim() != test.dim()) {
    throw ConfigError("checkpoint input dimension does not match the dataset");
  }
  const int points = point_limit(cfg, "certify.points", test.size(), 0);

  struct Row {
    CertifyOutcome outcome;
    double seconds = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(points));
  parallel_for(rows.size(), opts.workers, [&](std::size_t i) {
    const auto t0 = Clock::now();
    RngStream rng(seed, "certify", i);
    rows[i].outcome = certify(params, test.x(static_cast<int>(i)), sc, rng);
    rows[i].seconds = seconds_since(t0, opts);
  });

  Manifest m = start_manifest("certify", cfg, seed);
  CertifiedResultSet set;
  set.smoothing = sc;
  set.seed = seed;
  {
    CsvWriter csv(opts.out / "certify.csv",
                  {"idx", "label", "predict", "radius", "p_lower", "correct", "time"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int label = test.labels[i];
      set.rows.push_back({label, rows[i].outcome});
      const auto* c = std::get_if<Certified>(&rows[i].outcome);
      csv.row({std::to_string(i), std::to_string(label),
               c ? std::to_string(c->predicted_class) : "-1",
               format_double(c ? c->radius : 0.0), format_double(c ? c->p_lower : 0.0),
               c && c->predicted_class == label ? "1" : "0", format_double(rows[i].seconds)});
    }
  }
  m.artifacts["certify"] = "certify.csv";
  if (!set.rows.empty()) {
    m.summary["acr"] = format_double(acr(set));
    const double zero = 0.0;
    m.summary["certified_accuracy_r0"] =
        format_double(certified_accuracy_curve(set, {&zero, 1}).front());
  }
  m.summary["points"] = std::to_string(points);
  m.summary["radius_ceiling"] = format_double(sc.radius_ceiling());
  m.timings["total_seconds"] = seconds_since(start, opts);
  return m;
}

CertifiedResultSet read_certify_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  require_header(table, {"idx", "label", "predict", "radius", "p_lower", "correct", "time"},
                 path.string());
  CertifiedResultSet set;
  set.model_id = path.parent_path().filename().string();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int label = static_cast<int>(table.integer(r, "label"));
    const int predict = static_cast<int>(table.integer(r, "predict"));
    if (predict < 0) {
      set.rows.push_back({label, Abstain{}});
    } else {
      set.rows.push_back(
          {label, Certified{predict, table.number(r, "radius"), table.number(r, "p_lower")}});
    }
  }
  return set;
}

Manifest cmd_evaluate(const FlatConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  const auto inputs = cfg.get_strings("evaluate.inputs", {});
  if (inputs.empty()) throw ConfigError("evaluate.inputs must list certification CSVs");
  auto names = cfg.get_strings("evaluate.names", {});
  if (!names.empty() && names.size() != inputs.size()) {
    throw ConfigError("evaluate.names must match evaluate.inputs in length");
  }
  const auto radii = cfg.get_doubles("evaluate.radii", {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5});
  if (!std::is_sorted(radii.begin(), radii.end())) {
    throw ConfigError("evaluate.radii must be nondecreasing");
  }
  std::vector<std::string> header = {"model", "points", "acr"};
  for (double r : radii) header.push_back(fixed2(r));

  Manifest m = start_manifest("evaluate", cfg, seed);
  CsvWriter csv(opts.out / "metrics.csv", header);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    fs::path path = inputs[i];
    if (path.is_relative()) path = cfg.base_dir() / path;
    if (!fs::exists(path)) throw ConfigError("certification CSV not found: " + path.string());
    const CertifiedResultSet set = read_certify_csv(path);
    if (set.rows.empty()) throw CsvError(path.string() + ": no rows");
    std::vector<std::string> row = {names.empty() ? set.model_id : names[i],
                                    std::to_string(set.rows.size()), format_double(acr(set))};
    for (double v : certified_accuracy_curve(set, radii)) row.push_back(format_double(v));
    csv.row(row);
  }
  m.artifacts["metrics"] = "metrics.csv";
  m.timings["total_seconds"] = seconds_since(start, opts);
  return m;
}

Manifest cmd_attack_demo(const FlatConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  const MethodConfig method = method_config(cfg);
  const ModelParams params = load_model(cfg, opts);
  const Dataset test = load_splits(cfg, seed).second;
  if (params.input_dim() != test.dim()) {
    throw ConfigError("checkpoint input dimension does not match the dataset");
  }
  const int points = point_limit(cfg, "demo.points", test.size(), 20);
  const int conf_points = point_limit(cfg, "demo.conf_points", test.size(), 200);
  const auto eps_grid = cfg.get_doubles("demo.eps_grid", {0.0, 0.25, 0.5, 1.0, 2.0});
  const int pgd_steps = to_int(cfg.get_int("demo.pgd_steps", 20), "demo.pgd_steps");
  const int conf_m = to_int(cfg.get_int("demo.conf_m", 1000), "demo.conf_m");
  if (pgd_steps < 1 || conf_m < 1) throw ConfigError("demo.pgd_steps and demo.conf_m must be >= 1");
  for (double e : eps_grid) {
    if (!(e >= 0.0)) throw ConfigError("demo.eps_grid entries must be >= 0");
  }

  // Trajectories of the unrestricted attack.
  std::vector<AttackTrajectory> trajectories(static_cast<std::size_t>(points));
  parallel_for(trajectories.size(), opts.workers, [&](std::size_t i) {
    RngStream rng(seed, "attack-demo", i);
    const NoiseBatch noise = sample_noise(method.sigma, test.dim(), method.m, rng);
    trajectories[i] = smoothmix_attack(params, test.x(static_cast<int>(i)), test.labels[i], noise,
                                       method.attack);
  });

  // Confidence of f at PGD points for each radius. A point reuses its
  // stream across radii, so the rows differ only through epsilon.
  std::vector<std::vector<PointConfidence>> conf(
      eps_grid.size(), std::vector<PointConfidence>(static_cast<std::size_t>(conf_points)));
  parallel_for(static_cast<std::size_t>(conf_points), opts.workers, [&](std::size_t i) {
    const Vector x = test.x(static_cast<int>(i));
    const int y = test.labels[i];
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      RngStream rng(seed, "attack-demo/confidence", i);
      const NoiseBatch noise = sample_noise(method.sigma, test.dim(), method.m, rng);
      Vector point = x;
      if (eps_grid[e] > 0.0) {
        point = smoothadv_pgd(params, x, y, noise, pgd_steps, 2.0 * eps_grid[e] / pgd_steps,
                              eps_grid[e]);
      }
      conf[e][i] = point_confidence(params, point, y, method.sigma, conf_m, rng);
    }
  });

  Manifest m = start_manifest("attack-demo", cfg, seed);
  {
    CsvWriter csv(opts.out / "attack_trajectory.csv",
                  {"idx", "label", "step", "objective", "distance", "true_conf"});
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      const auto& t = trajectories[i];
      const Vector x = test.x(static_cast<int>(i));
      for (std::size_t s = 0; s < t.points.size(); ++s) {
        const SoftLabel fhat = soft_smoothed_predict(params, t.points[s], t.noise);
        csv.row({std::to_string(i), std::to_string(test.labels[i]), std::to_string(s),
                 format_double(t.objective[s]), format_double((t.points[s] - x).norm()),
                 format_double(fhat[test.labels[i]])});
      }
    }
  }
  {
    CsvWriter csv(opts.out / "attack_confidence.csv",
                  {"epsilon", "points", "true_conf", "true_se", "off_conf", "off_se"});
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      const ConfidenceStats s = summarize_confidence(conf[e], conf_m);
      csv.row({format_double(eps_grid[e]), std::to_string(s.points), format_double(s.true_class),
               format_double(s.true_class_se), format_double(s.max_off_class),
               format_double(s.max_off_class_se)});
    }
  }
  m.artifacts["trajectory"] = "attack_trajectory.csv";
  m.artifacts["confidence"] = "attack_confidence.csv";
  m.timings["total_seconds"] = seconds_since(start, opts);
  return m;
}

Manifest cmd_mixratio(const FlatConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  const double sigma = cfg.get_double("mixratio.sigma", cfg.get_double("sigma", 0.5));
  const int pgd_steps = to_int(cfg.get_int("mixratio.pgd_steps", 50), "mixratio.pgd_steps");
  const double pgd_eps = cfg.get_double("mixratio.pgd_eps", 8.0);
  const int est_m = to_int(cfg.get_int("mixratio.m", 64), "mixratio.m");
  if (!(sigma > 0.0) || pgd_steps < 1 || !(pgd_eps > 0.0) || est_m < 1) {
    throw ConfigError("mixratio: sigma, pgd_steps, pgd_eps and m must be positive");
  }
  const ModelParams params = load_model(cfg, opts);
  const Dataset test = load_splits(cfg, seed).second;
  if (params.input_dim() != test.dim()) {
    throw ConfigError("checkpoint input dimension does not match the dataset");
  }
  const int points = point_limit(cfg, "mixratio.points", test.size(), 200);

  std::vector<MixRatio> ratios(static_cast<std::size_t>(points));
  parallel_for(ratios.size(), opts.workers, [&](std::size_t i) {
    RngStream rng(seed, "mixratio", i);
    ratios[i] = equal_confidence_mixing_ratio(params, test.x(static_cast<int>(i)), test.labels[i],
                                              sigma, pgd_steps, pgd_eps, est_m, rng);
  });

  Manifest m = start_manifest("mixratio", cfg, seed);
  std::vector<double> lambdas;
  int found = 0;
  {
    CsvWriter csv(opts.out / "mixratio.csv", {"idx", "label", "lambda_star", "found", "status"});
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const MixRatio& r = ratios[i];
      std::string status = "found";
      std::string lambda = format_double(r.lambda);
      if (r.status == MixRatioStatus::kNoFlip) {
        status = "no_flip";
        lambda = "inf";
        lambdas.push_back(std::numeric_limits<double>::infinity());
      } else if (r.status == MixRatioStatus::kMisclassified) {
        status = "misclassified";
        lambda = "nan";
      } else {
        ++found;
        lambdas.push_back(r.lambda);
      }
      csv.row({std::to_string(i), std::to_string(test.labels[i]), lambda, r.found() ? "1" : "0",
               status});
    }
  }
  m.artifacts["mixratio"] = "mixratio.csv";
  m.summary["found"] = std::to_string(found);
  m.summary["correct"] = std::to_string(lambdas.size());
  if (!lambdas.empty()) {
    auto mid = lambdas.begin() + static_cast<std::ptrdiff_t>(lambdas.size() / 2);
    std::nth_element(lambdas.begin(), mid, lambdas.end());
    m.summary["median_lambda"] = format_double(*mid);
  }
  m.timings["total_seconds"] = seconds_since(start, opts);
  return m;
}

Manifest cmd_theory_sim(const FlatConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  TheorySimConfig base;
  base.sigma = cfg.get_double("theory.sigma", base.sigma);
  base.tau = cfg.get_double("theory.tau", base.tau);
  base.epsilon = cfg.get_double("theory.epsilon", base.epsilon);
  base.p = cfg.get_double("theory.p", base.p);
  base.trials = cfg.get_int("theory.trials", base.trials);
  base.chunk = cfg.get_int("theory.chunk", base.chunk);
  base.direction = parse_shift_direction(cfg.get_string("theory.direction", "axis"));
  base.workers = std::max(1, opts.workers);
  const auto dims = cfg.get_ints("theory.dims", {64, 256, 1024, 4096});
  std::vector<NoiseFamily> families;
  for (const auto& name : cfg.get_strings("theory.families", {"gaussian", "uniform_pm"})) {
    families.push_back(parse_noise_family(name));
  }
  base.validate();

  Manifest m = start_manifest("theory-sim", cfg, seed);
  CsvWriter csv(opts.out / "theory.csv", {"family", "d", "k", "k_chebyshev", "estimate",
                                          "std_error", "bound_C_over_d", "C", "pass"});
  bool all_pass = true;
  for (std::size_t f = 0; f < families.size(); ++f) {
    TheorySimConfig cfg_f = base;
    cfg_f.family = families[f];
    DecayReport report;
    try {
      report = verify_decay(cfg_f, dims, mix64(seed ^ static_cast<std::uint64_t>(f)));
    } catch (const BelowDimensionThreshold& e) {
      throw ConfigError(e.what());
    }
    for (const auto& row : report.rows) {
      csv.row({std::string(noise_family_name(cfg_f.family)), std::to_string(row.d),
               format_double(row.k), format_double(row.k_chebyshev),
               format_double(row.prob.estimate), format_double(row.prob.std_error),
               format_double(row.bound), format_double(report.C), row.pass ? "1" : "0"});
    }
    all_pass = all_pass && report.pass && report.product_bounded;
    m.summary["C_" + std::string(noise_family_name(cfg_f.family))] = format_double(report.C);
  }
  m.artifacts["theory"] = "theory.csv";
  m.summary["pass"] = all_pass ? "true" : "false";
  m.timings["total_seconds"] = seconds_since(start, opts);
  return m;
}

// ---- dispatch -------------------------------------------------------------------

Manifest run_command(const std::string& command, const RunOptions& opts) {
  if (opts.workers < 1) throw ConfigError("--workers must be >= 1");
  const FlatConfig cfg = FlatConfig::load(opts.config);
  cfg.reject_unknown(known_config_keys());
  std::error_code ec;
  fs::create_directories(opts.out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + opts.out.string());

  Manifest m;
  if (command == "train") {
    m = cmd_train(cfg, opts);
  } else if (command == "certify") {
    m = cmd_certify(cfg, opts);
  } else if (command == "evaluate") {
    m = cmd_evaluate(cfg, opts);
  } else if (command == "attack-demo") {
    m = cmd_attack_demo(cfg, opts);
  } else if (command == "mixratio") {
    m = cmd_mixratio(cfg, opts);
  } else if (command == "theory-sim") {
    m = cmd_theory_sim(cfg, opts);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  for (const auto& [name, file] : m.artifacts) {
    if (!fs::exists(opts.out / file)) throw std::runtime_error("artifact missing: " + file);
  }
  m.artifacts["manifest"] = "manifest.json";
  std::ofstream out(opts.out / "manifest.json", std::ios::binary);
  out << m.to_json();
  if (!out) throw std::runtime_error("cannot write manifest");
  return m;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"SmoothMix training, certification and diagnostics"};
  app.require_subcommand(1);
  RunOptions opts;
  std::uint64_t seed = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "Train a classifier (gaussian, smoothadv or smoothmix)"},
      {"certify", "Certify the test split of a trained model"},
      {"evaluate", "ACR and certified accuracy from certification CSVs"},
      {"attack-demo", "Attack trajectories and confidence at PGD points"},
      {"mixratio", "Equal-confidence mixing ratios"},
      {"theory-sim", "Monte Carlo check of the dimension bound"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "Flat key=value config file")->required();
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timings", [&opts](std::int64_t) { opts.timings = false; },
                  "Write zero for every wall-clock field");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") != 0) opts.seed = seed;
  try {
    const Manifest m = run_command(chosen->get_name(), opts);
    std::cout << m.run_id << " -> " << (opts.out / "manifest.json").string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace smoothmix::tools
