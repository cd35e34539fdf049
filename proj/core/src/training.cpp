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

#include "smoothmix/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "smoothmix/errors.hpp"

namespace smoothmix {

TrainMethod parse_train_method(std::string_view name) {
  if (name == "gaussian") return TrainMethod::kGaussian;
  if (name == "smoothadv") return TrainMethod::kSmoothAdv;
  if (name == "smoothmix") return TrainMethod::kSmoothMix;
  throw ConfigError("unknown training method '" + std::string(name) + "'");
}

std::string_view train_method_name(TrainMethod method) {
  switch (method) {
    case TrainMethod::kGaussian: return "gaussian";
    case TrainMethod::kSmoothAdv: return "smoothadv";
    case TrainMethod::kSmoothMix: return "smoothmix";
  }
  return "unknown";
}

void SmoothMixConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("smoothmix: eta must be > 0");
  if (m < 1) throw ConfigError("smoothmix: m must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("smoothmix: sigma must be > 0");
  if (one_step_cap && !(*one_step_cap > 0.0)) throw ConfigError("smoothmix: one_step_cap must be > 0");
  attack.validate();
}

void SmoothAdvConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("smoothadv: epsilon must be > 0");
  if (steps < 1) throw ConfigError("smoothadv: steps must be >= 1");
  if (warmup_epochs < 0) throw ConfigError("smoothadv: warmup_epochs must be >= 0");
  if (m < 1) throw ConfigError("smoothadv: m must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("smoothadv: sigma must be > 0");
}

double SmoothAdvConfig::effective_epsilon(int epoch) const {
  if (epoch >= warmup_epochs) return epsilon;
  return epsilon * static_cast<double>(epoch + 1) / static_cast<double>(warmup_epochs);
}

double SmoothAdvConfig::step_size(int epoch) const {
  return 2.0 * effective_epsilon(epoch) / static_cast<double>(steps);
}

// ---- single-example losses ------------------------------------------------------

namespace {

Matrix noisy_copies(const Vector& x, const NoiseBatch& noise) {
  if (noise.dim() != x.size()) throw DimensionMismatch("noise batch", x.size(), noise.dim());
  return noise.deltas.colwise() + x;
}

double mean_ce(const ModelParams& params, const Matrix& noisy, const SoftLabel& target) {
  const Matrix targets = target.probs().replicate(1, noisy.cols());
  const Vector weights = Vector::Constant(noisy.cols(), 1.0 / static_cast<double>(noisy.cols()));
  return weighted_cross_entropy(params, noisy, targets, weights, false, false).loss;
}

}  // namespace

double gaussian_loss(const ModelParams& params, const Vector& x, int y,
                     const NoiseBatch& noise) {
  return mean_ce(params, noisy_copies(x, noise), SoftLabel::one_hot(y, params.class_count()));
}

MixPair make_mix_pair(const Vector& x_base, const SoftLabel& fhat_base,
                      const Vector& x_adv, double lambda, int class_count) {
  if (!(lambda >= 0.0 && lambda <= 0.5)) {
    throw std::invalid_argument("make_mix_pair: lambda must lie in [0, 1/2]");
  }
  if (fhat_base.size() != class_count) {
    throw DimensionMismatch("make_mix_pair label", class_count, fhat_base.size());
  }
  if (x_adv.size() != x_base.size()) throw DimensionMismatch("make_mix_pair", x_base.size(), x_adv.size());
  MixPair pair;
  pair.lambda = lambda;
  pair.x_mix = (1.0 - lambda) * x_base + lambda * x_adv;
  Vector y = (1.0 - lambda) * fhat_base.probs();
  y.array() += lambda / static_cast<double>(class_count);
  pair.y_mix = SoftLabel::from_probs(std::move(y));
  return pair;
}

double smoothmix_loss(const ModelParams& params, const MixPair& pair, const NoiseBatch& noise) {
  return mean_ce(params, noisy_copies(pair.x_mix, noise), pair.y_mix);
}

SmoothMixLoss smoothmix_batch_loss(const ModelParams& params, const Vector& x, int y,
                                   const SmoothMixConfig& cfg, RngStream& rng) {
  const int labels[] = {y};
  MinibatchLoss mb = smoothmix_minibatch(params, x, labels, cfg, {&rng, 1}, true);
  SmoothMixLoss out;
  out.total = mb.loss;
  out.diagnostics = std::move(mb.diagnostics.front());
  return out;
}

// ---- minibatch losses -----------------------------------------------------------

namespace {

void check_minibatch(const Matrix& xs, std::span<const int> labels, std::span<RngStream> rngs) {
  if (xs.cols() == 0) throw std::invalid_argument("minibatch: empty");
  if (static_cast<Eigen::Index>(labels.size()) != xs.cols()) {
    throw DimensionMismatch("minibatch labels", xs.cols(), static_cast<long>(labels.size()));
  }
  if (static_cast<Eigen::Index>(rngs.size()) != xs.cols()) {
    throw DimensionMismatch("minibatch rng streams", xs.cols(), static_cast<long>(rngs.size()));
  }
}

// Averages noisy one-hot cross-entropy at `points` (d x B) over noise and batch.
MinibatchLoss noisy_onehot_loss(const ModelParams& params, const Matrix& points,
                                std::span<const int> labels,
                                std::span<const NoiseBatch> noise) {
  const auto batch = points.cols();
  const int m = noise.front().size();
  const int classes = params.class_count();
  Matrix noisy(points.rows(), batch * m);
  Matrix targets = Matrix::Zero(classes, batch * m);
  for (Eigen::Index b = 0; b < batch; ++b) {
    noisy.middleCols(b * m, m) = noise[static_cast<std::size_t>(b)].deltas.colwise() + points.col(b);
    targets.row(labels[static_cast<std::size_t>(b)]).segment(b * m, m).setOnes();
  }
  const Vector weights = Vector::Constant(batch * m, 1.0 / static_cast<double>(batch * m));
  auto ce = weighted_cross_entropy(params, noisy, targets, weights, true, false);
  MinibatchLoss out;
  out.loss = ce.loss;
  out.loss_nat = ce.loss;
  out.grad = std::move(ce.grad.param_grad);
  return out;
}

std::vector<NoiseBatch> draw_noise(double sigma, int d, int m, std::span<RngStream> rngs) {
  std::vector<NoiseBatch> noise;
  noise.reserve(rngs.size());
  for (auto& rng : rngs) noise.push_back(sample_noise(sigma, d, m, rng));
  return noise;
}

}  // namespace

MinibatchLoss gaussian_minibatch(const ModelParams& params, const Matrix& xs,
                                 std::span<const int> labels, double sigma, int m,
                                 std::span<RngStream> rngs) {
  check_minibatch(xs, labels, rngs);
  const auto noise = draw_noise(sigma, static_cast<int>(xs.rows()), m, rngs);
  return noisy_onehot_loss(params, xs, labels, noise);
}

MinibatchLoss smoothadv_minibatch(const ModelParams& params, const Matrix& xs,
                                  std::span<const int> labels, const SmoothAdvConfig& cfg,
                                  int epoch, std::span<RngStream> rngs) {
  check_minibatch(xs, labels, rngs);
  const auto noise = draw_noise(cfg.sigma, static_cast<int>(xs.rows()), cfg.m, rngs);
  const Matrix adv = smoothadv_pgd_batch(params, xs, labels, noise, cfg.steps,
                                         cfg.step_size(epoch), cfg.effective_epsilon(epoch));
  return noisy_onehot_loss(params, adv, labels, noise);
}

MinibatchLoss smoothmix_minibatch(const ModelParams& params, const Matrix& xs,
                                  std::span<const int> labels, const SmoothMixConfig& cfg,
                                  std::span<RngStream> rngs, bool keep_diagnostics) {
  check_minibatch(xs, labels, rngs);
  const auto batch = xs.cols();
  const int d = static_cast<int>(xs.rows());
  const int m = cfg.m;
  const int classes = params.class_count();

  // Noise first, then lambda, per example.
  std::vector<NoiseBatch> noise;
  std::vector<double> lambdas;
  noise.reserve(static_cast<std::size_t>(batch));
  for (auto& rng : rngs) {
    noise.push_back(sample_noise(cfg.sigma, d, m, rng));
    lambdas.push_back(0.5 * rng.uniform());
  }

  const auto trajectories = smoothmix_attack_batch(params, xs, labels, noise, cfg.attack);

  // Columns [0, B*m) carry L_nat, [B*m, 2*B*m) carry L_mix.
  const auto half = batch * m;
  Matrix noisy(d, 2 * half);
  Matrix targets = Matrix::Zero(classes, 2 * half);
  Vector weights(2 * half);
  const double w = 1.0 / static_cast<double>(half);
  std::vector<MixPair> pairs;
  std::vector<Vector> anchors;
  pairs.reserve(static_cast<std::size_t>(batch));
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& traj = trajectories[static_cast<std::size_t>(b)];
    const auto& delta = noise[static_cast<std::size_t>(b)].deltas;
    Vector anchor = xs.col(b);
    if (cfg.use_one_step && traj.points.size() > 1) {
      anchor = traj.points[1];
      if (cfg.one_step_cap) anchor = l2_project(anchor, xs.col(b), *cfg.one_step_cap);
    }
    MixPair pair = make_mix_pair(anchor, traj.fhat_at_start, traj.points.back(),
                                 lambdas[static_cast<std::size_t>(b)], classes);
    noisy.middleCols(b * m, m) = delta.colwise() + anchor;
    noisy.middleCols(half + b * m, m) = delta.colwise() + pair.x_mix;
    targets.row(labels[static_cast<std::size_t>(b)]).segment(b * m, m).setOnes();
    targets.middleCols(half + b * m, m) = pair.y_mix.probs().replicate(1, m);
    weights.segment(b * m, m).setConstant(w);
    weights.segment(half + b * m, m).setConstant(cfg.eta * w);
    pairs.push_back(std::move(pair));
    anchors.push_back(std::move(anchor));
  }
  auto ce = weighted_cross_entropy(params, noisy, targets, weights, true, false);

  MinibatchLoss out;
  out.loss = ce.loss;
  out.loss_nat = ce.per_column.head(half).mean();
  out.loss_mix = ce.per_column.tail(half).mean();
  out.grad = std::move(ce.grad.param_grad);
  if (keep_diagnostics) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      SmoothMixDiagnostics diag;
      diag.lambda = lambdas[ub];
      diag.loss_nat = ce.per_column.segment(b * m, m).mean();
      diag.loss_mix = ce.per_column.segment(half + b * m, m).mean();
      diag.objective = trajectories[ub].objective;
      diag.anchor = anchors[ub];
      diag.x_adv = trajectories[ub].points.back();
      diag.pair = pairs[ub];
      diag.noise = noise[ub];
      out.diagnostics.push_back(std::move(diag));
    }
  }
  return out;
}

// ---- training loop --------------------------------------------------------------

void TrainRunConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(lr >= 0.0)) throw ConfigError("train: lr must be >= 0");
  if (!(lr_gamma > 0.0)) throw ConfigError("train: lr_gamma must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train: momentum must lie in [0,1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be >= 0");
  for (std::size_t i = 1; i < lr_milestones.size(); ++i) {
    if (lr_milestones[i] <= lr_milestones[i - 1]) {
      throw ConfigError("train: lr_milestones must be increasing");
    }
  }
  for (int width : hidden) {
    if (width < 1) throw ConfigError("train: hidden widths must be >= 1");
  }
}

double TrainRunConfig::lr_at(int epoch) const {
  const auto passed = std::count_if(lr_milestones.begin(), lr_milestones.end(),
                                    [epoch](int milestone) { return milestone <= epoch; });
  return lr * std::pow(lr_gamma, static_cast<double>(passed));
}

SmoothMixConfig MethodConfig::smoothmix() const {
  return SmoothMixConfig{eta, attack, m, use_one_step, one_step_cap, sigma};
}

SmoothAdvConfig MethodConfig::smoothadv() const {
  return SmoothAdvConfig{adv_epsilon, adv_steps, adv_warmup_epochs, m, sigma};
}

void MethodConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("method: sigma must be > 0");
  if (m < 1) throw ConfigError("method: m must be >= 1");
  switch (method) {
    case TrainMethod::kGaussian: break;
    case TrainMethod::kSmoothAdv: smoothadv().validate(); break;
    case TrainMethod::kSmoothMix: smoothmix().validate(); break;
  }
}

TrainResult train(const Dataset& data, const TrainRunConfig& run, const MethodConfig& method,
                  std::optional<ModelParams> init) {
  run.validate();
  method.validate();
  data.validate();
  if (data.size() == 0) throw ConfigError("train: dataset is empty");

  TrainResult result;
  result.params = init ? std::move(*init)
                       : make_mlp(data.dim(), run.hidden, data.class_count, run.seed);
  if (result.params.input_dim() != data.dim()) {
    throw DimensionMismatch("train: model input", data.dim(), result.params.input_dim());
  }
  OptimizerState opt = OptimizerState::for_params(result.params, run.lr, run.momentum,
                                                  run.weight_decay);
  const SmoothMixConfig mix_cfg = method.smoothmix();
  const SmoothAdvConfig adv_cfg = method.smoothadv();
  const int n = data.size();

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int epoch = 0; epoch < run.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    opt.lr = run.lr_at(epoch);
    std::iota(order.begin(), order.end(), 0);
    RngStream shuffle(run.seed, "train/shuffle", static_cast<std::uint64_t>(epoch));
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    double nat_sum = 0.0;
    double mix_sum = 0.0;
    for (int begin = 0; begin < n; begin += run.batch_size) {
      const int count = std::min(run.batch_size, n - begin);
      Matrix xs(data.dim(), count);
      std::vector<int> labels(static_cast<std::size_t>(count));
      std::vector<RngStream> rngs;
      rngs.reserve(static_cast<std::size_t>(count));
      for (int j = 0; j < count; ++j) {
        const int idx = order[static_cast<std::size_t>(begin + j)];
        xs.col(j) = data.inputs.col(idx);
        labels[static_cast<std::size_t>(j)] = data.labels[static_cast<std::size_t>(idx)];
        rngs.emplace_back(run.seed, "train/example",
                          static_cast<std::uint64_t>(epoch) * static_cast<std::uint64_t>(n) +
                              static_cast<std::uint64_t>(idx));
      }
      MinibatchLoss mb;
      switch (method.method) {
        case TrainMethod::kGaussian:
          mb = gaussian_minibatch(result.params, xs, labels, method.sigma, method.m, rngs);
          break;
        case TrainMethod::kSmoothAdv:
          mb = smoothadv_minibatch(result.params, xs, labels, adv_cfg, epoch, rngs);
          break;
        case TrainMethod::kSmoothMix:
          mb = smoothmix_minibatch(result.params, xs, labels, mix_cfg, rngs);
          break;
      }
      nat_sum += mb.loss_nat * count;
      mix_sum += mb.loss_mix * count;
      sgd_nesterov_step(result.params, mb.grad, opt);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.log.push_back({epoch, nat_sum / n, mix_sum / n, opt.lr, elapsed.count()});
  }
  return result;
}

double clean_accuracy(const ModelParams& params, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  const Matrix logits = forward_batch(params, data.inputs);
  int correct = 0;
  for (int j = 0; j < data.size(); ++j) {
    if (argmax_lowest(logits.col(j)) == data.labels[static_cast<std::size_t>(j)]) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

}  // namespace smoothmix
