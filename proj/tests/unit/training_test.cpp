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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "smoothmix/errors.hpp"
#include "smoothmix/training.hpp"
#include "testing.hpp"

namespace smoothmix {
namespace {

using testing::Gen;

std::vector<RngStream> streams(std::uint64_t seed, int count) {
  std::vector<RngStream> out;
  for (int i = 0; i < count; ++i) out.emplace_back(seed, "example", static_cast<std::uint64_t>(i));
  return out;
}

TEST(MixPair, IdentityAtLambdaZero) {
  Gen g(61, "mix0", 0);
  const Vector x = g.vector(4);
  const Vector adv = g.vector(4);
  const SoftLabel f = g.soft_label(3);
  const MixPair pair = make_mix_pair(x, f, adv, 0.0, 3);
  EXPECT_EQ(pair.x_mix, x);
  EXPECT_LT((pair.y_mix.probs() - f.probs()).norm(), 1e-15);
}

TEST(MixPair, HalfwayPointAndLabel) {
  Vector x(2), adv(2), f(2);
  x << 0.0, 2.0;
  adv << 4.0, -2.0;
  f << 0.9, 0.1;
  const MixPair pair = make_mix_pair(x, SoftLabel::from_probs(f), adv, 0.5, 2);
  EXPECT_NEAR(pair.x_mix[0], 2.0, 1e-15);
  EXPECT_NEAR(pair.x_mix[1], 0.0, 1e-15);
  EXPECT_NEAR(pair.y_mix[0], 0.45 + 0.25, 1e-15);
  EXPECT_NEAR(pair.y_mix[1], 0.05 + 0.25, 1e-15);
}

TEST(MixPair, RejectsLambdaOutsideHalfInterval) {
  const Vector x = Vector::Zero(2);
  EXPECT_THROW(make_mix_pair(x, SoftLabel::uniform(2), x, 0.51, 2), std::invalid_argument);
  EXPECT_THROW(make_mix_pair(x, SoftLabel::uniform(2), x, -0.01, 2), std::invalid_argument);
  EXPECT_THROW(make_mix_pair(x, SoftLabel::uniform(3), x, 0.2, 2), DimensionMismatch);
}

TEST(MixPair, PropertyLabelStaysOnSimplexAndEntropyGrows) {
  for (int c = 0; c < 200; ++c) {
    Gen g(67, "mixprop", c);
    const int k = g.integer(2, 10);
    const SoftLabel f = g.soft_label(k);
    const double lambda = g.real(0.0, 0.5);
    const MixPair pair = make_mix_pair(g.vector(3), f, g.vector(3), lambda, k);
    EXPECT_NEAR(pair.y_mix.probs().sum(), 1.0, 1e-12);
    // Mixing with the uniform distribution never lowers entropy.
    EXPECT_GE(entropy(pair.y_mix) + 1e-12, entropy(f));
    EXPECT_LE(pair.y_mix.probs().maxCoeff(), f.probs().maxCoeff() + 1e-15);
  }
}

TEST(SmoothMixLoss, LambdaIsUniformOnHalfInterval) {
  // Kolmogorov-Smirnov against U[0, 1/2]; 1.95 / sqrt(n) is the 0.1% level.
  const int n = 4000;
  const ModelParams p = Gen(71, "ks", 0).mlp(2, 2);
  const Matrix xs = Matrix::Zero(2, n);
  const std::vector<int> labels(static_cast<std::size_t>(n), 0);
  auto rngs = streams(71, n);
  SmoothMixConfig cfg;
  cfg.m = 1;
  cfg.attack.steps = 0;
  const MinibatchLoss mb = smoothmix_minibatch(p, xs, labels, cfg, rngs, true);
  std::vector<double> lambdas;
  for (const auto& d : mb.diagnostics) lambdas.push_back(d.lambda);
  std::sort(lambdas.begin(), lambdas.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 2.0 * lambdas[static_cast<std::size_t>(i)];
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                   std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(ks, 1.95 / std::sqrt(static_cast<double>(n)));
  EXPECT_GE(lambdas.front(), 0.0);
  EXPECT_LE(lambdas.back(), 0.5);
}

TEST(SmoothMixLoss, MinibatchEqualsPerExampleDefinition) {
  Gen g(73, "def", 0);
  const ModelParams p = g.mlp(3, 3);
  const int batch = 5;
  Matrix xs(3, batch);
  std::vector<int> labels;
  for (int b = 0; b < batch; ++b) {
    xs.col(b) = g.vector(3);
    labels.push_back(g.integer(0, 2));
  }
  SmoothMixConfig cfg;
  cfg.eta = 3.0;
  cfg.m = 4;
  cfg.attack.steps = 3;
  auto rngs = streams(73, batch);
  const MinibatchLoss mb = smoothmix_minibatch(p, xs, labels, cfg, rngs, true);
  double nat = 0.0, mix = 0.0;
  for (int b = 0; b < batch; ++b) {
    const auto& d = mb.diagnostics[static_cast<std::size_t>(b)];
    EXPECT_EQ(d.anchor, Vector(xs.col(b)));
    // Noise is reproducible from its provenance, and F^ is taken at x.
    EXPECT_EQ(regenerate_noise(cfg.sigma, 3, cfg.m, d.noise.provenance).deltas, d.noise.deltas);
    const SoftLabel fhat = soft_smoothed_predict(p, xs.col(b), d.noise);
    const auto pair = make_mix_pair(xs.col(b), fhat, d.x_adv, d.lambda, 3);
    EXPECT_LT((pair.y_mix.probs() - d.pair.y_mix.probs()).norm(), 1e-14);
    const double ln = gaussian_loss(p, xs.col(b), labels[static_cast<std::size_t>(b)], d.noise);
    const double lm = smoothmix_loss(p, d.pair, d.noise);
    EXPECT_NEAR(d.loss_nat, ln, 1e-12);
    EXPECT_NEAR(d.loss_mix, lm, 1e-12);
    nat += ln / batch;
    mix += lm / batch;
  }
  EXPECT_NEAR(mb.loss_nat, nat, 1e-12);
  EXPECT_NEAR(mb.loss_mix, mix, 1e-12);
  EXPECT_NEAR(mb.loss, nat + cfg.eta * mix, 1e-11);
}

TEST(SmoothMixLoss, GradientMatchesFiniteDifferencesOfDetachedLoss) {
  constexpr double h = 1e-6;
  Gen g(79, "mixgrad", 0);
  ModelParams p = g.mlp(3, 3, 1, 6);
  const int batch = 3;
  Matrix xs(3, batch);
  std::vector<int> labels = {0, 1, 2};
  for (int b = 0; b < batch; ++b) xs.col(b) = g.vector(3);
  SmoothMixConfig cfg;
  cfg.m = 2;
  auto rngs = streams(79, batch);
  const MinibatchLoss mb = smoothmix_minibatch(p, xs, labels, cfg, rngs, true);
  // The mix target and adversarial point are constants of the loss.
  auto detached = [&](const ModelParams& q) {
    double total = 0.0;
    for (int b = 0; b < batch; ++b) {
      const auto& d = mb.diagnostics[static_cast<std::size_t>(b)];
      total += gaussian_loss(q, d.anchor, labels[static_cast<std::size_t>(b)], d.noise) +
               cfg.eta * smoothmix_loss(q, d.pair, d.noise);
    }
    return total / batch;
  };
  EXPECT_NEAR(detached(p), mb.loss, 1e-12);
  int checked = 0;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    for (Eigen::Index i = 0; i < p.layers[l].weight.size(); ++i) {
      double& w = p.layers[l].weight.data()[i];
      const double orig = w;
      w = orig + h;
      const double up = detached(p);
      w = orig - h;
      const double down = detached(p);
      w = orig;
      const double fd = (up - down) / (2 * h);
      const double an = mb.grad.layers[l].weight.data()[i];
      if (std::max(std::abs(fd), std::abs(an)) < 1e-6) continue;
      // A kink crossing shows up as a gross mismatch; there are few of them.
      if (testing::relative_error(fd, an) < 1e-4) ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(SmoothMixLoss, OneStepAnchorUsesFirstIterate) {
  Gen g(83, "onestep", 0);
  const ModelParams p = g.mlp(4, 3);
  Matrix xs(4, 2);
  xs.col(0) = g.vector(4);
  xs.col(1) = g.vector(4);
  const std::vector<int> labels = {1, 2};
  SmoothMixConfig cfg;
  cfg.use_one_step = true;
  cfg.attack.alpha_step = 2.0;
  auto rngs = streams(83, 2);
  const auto mb = smoothmix_minibatch(p, xs, labels, cfg, rngs, true);
  for (int b = 0; b < 2; ++b) {
    const auto& d = mb.diagnostics[static_cast<std::size_t>(b)];
    const auto traj = smoothmix_attack(p, xs.col(b), labels[static_cast<std::size_t>(b)],
                                       d.noise, cfg.attack);
    EXPECT_LT((d.anchor - traj.points[1]).norm(), 1e-12);
    // The mix label still uses F^ at the clean x.
    Vector expect = (1 - d.lambda) * traj.fhat_at_start.probs();
    expect.array() += d.lambda / 3.0;
    EXPECT_LT((d.pair.y_mix.probs() - expect).norm(), 1e-14);
    EXPECT_LT((d.pair.x_mix - ((1 - d.lambda) * traj.points[1] + d.lambda * traj.points.back())).norm(),
              1e-12);
  }
  cfg.one_step_cap = 0.5;
  auto rngs2 = streams(83, 2);
  const auto capped = smoothmix_minibatch(p, xs, labels, cfg, rngs2, true);
  for (int b = 0; b < 2; ++b) {
    EXPECT_LE((capped.diagnostics[static_cast<std::size_t>(b)].anchor - xs.col(b)).norm(), 0.5 + 1e-12);
  }
}

TEST(SmoothMixLoss, ExampleRandomnessIndependentOfBatchOrder) {
  Gen g(89, "order", 0);
  const ModelParams p = g.mlp(2, 2);
  Matrix xs(2, 3);
  for (int b = 0; b < 3; ++b) xs.col(b) = g.vector(2);
  std::vector<int> labels = {0, 1, 0};
  SmoothMixConfig cfg;
  std::vector<RngStream> fwd = {RngStream(1, "e", 0), RngStream(1, "e", 1), RngStream(1, "e", 2)};
  std::vector<RngStream> rev = {RngStream(1, "e", 2), RngStream(1, "e", 1), RngStream(1, "e", 0)};
  Matrix xr(2, 3);
  xr << xs.col(2), xs.col(1), xs.col(0);
  std::vector<int> lr = {0, 1, 0};
  const auto a = smoothmix_minibatch(p, xs, labels, cfg, fwd, true);
  const auto b = smoothmix_minibatch(p, xr, lr, cfg, rev, true);
  EXPECT_EQ(a.diagnostics[0].lambda, b.diagnostics[2].lambda);
  EXPECT_EQ(a.diagnostics[0].x_adv, b.diagnostics[2].x_adv);
  EXPECT_NEAR(a.loss, b.loss, 1e-12);
}

TEST(SmoothMixLoss, SingleExampleTotal) {
  Gen g(97, "single", 0);
  const ModelParams p = g.mlp(3, 2);
  SmoothMixConfig cfg;
  cfg.eta = 5.0;
  RngStream rng(97, "one", 0);
  const SmoothMixLoss out = smoothmix_batch_loss(p, g.vector(3), 1, cfg, rng);
  EXPECT_NEAR(out.total, out.diagnostics.loss_nat + 5.0 * out.diagnostics.loss_mix, 1e-12);
  EXPECT_EQ(out.diagnostics.objective.size(), static_cast<std::size_t>(cfg.attack.steps) + 1);
}

TEST(GaussianMinibatch, MatchesGaussianLoss) {
  Gen g(101, "gauss", 0);
  const ModelParams p = g.mlp(3, 3);
  Matrix xs(3, 4);
  for (int b = 0; b < 4; ++b) xs.col(b) = g.vector(3);
  const std::vector<int> labels = {0, 1, 2, 1};
  auto rngs = streams(101, 4);
  const auto mb = gaussian_minibatch(p, xs, labels, 0.5, 6, rngs);
  auto replay = streams(101, 4);
  double total = 0.0;
  for (int b = 0; b < 4; ++b) {
    const NoiseBatch n = sample_noise(0.5, 3, 6, replay[static_cast<std::size_t>(b)]);
    total += gaussian_loss(p, xs.col(b), labels[static_cast<std::size_t>(b)], n) / 4;
  }
  EXPECT_NEAR(mb.loss, total, 1e-12);
  EXPECT_EQ(mb.loss_mix, 0.0);
}

TEST(SmoothAdv, WarmupRampAndStepSize) {
  SmoothAdvConfig cfg;
  cfg.epsilon = 2.0;
  cfg.warmup_epochs = 4;
  cfg.steps = 8;
  EXPECT_DOUBLE_EQ(cfg.effective_epsilon(0), 0.5);
  EXPECT_DOUBLE_EQ(cfg.effective_epsilon(3), 2.0);
  EXPECT_DOUBLE_EQ(cfg.effective_epsilon(10), 2.0);
  EXPECT_DOUBLE_EQ(cfg.step_size(1), 2.0 * 1.0 / 8);
  cfg.warmup_epochs = 0;
  EXPECT_DOUBLE_EQ(cfg.effective_epsilon(0), 2.0);
}

TEST(SmoothAdv, MinibatchTrainsOnPointsInsideTheBall) {
  Gen g(103, "adv", 0);
  const ModelParams p = g.mlp(2, 2);
  Matrix xs(2, 3);
  for (int b = 0; b < 3; ++b) xs.col(b) = g.vector(2);
  const std::vector<int> labels = {0, 1, 1};
  SmoothAdvConfig cfg;
  cfg.epsilon = 0.3;
  cfg.warmup_epochs = 0;
  auto rngs = streams(103, 3);
  const auto mb = smoothadv_minibatch(p, xs, labels, cfg, 0, rngs);
  EXPECT_TRUE(std::isfinite(mb.loss));
  // Adversarial points only raise the noisy loss relative to the clean ones.
  auto replay = streams(103, 3);
  const auto clean = gaussian_minibatch(p, xs, labels, cfg.sigma, cfg.m, replay);
  EXPECT_GE(mb.loss, clean.loss - 1e-12);
}

TEST(TrainConfig, LearningRateSchedule) {
  TrainRunConfig run;
  run.lr = 0.1;
  run.lr_milestones = {10, 20};
  run.lr_gamma = 0.1;
  EXPECT_DOUBLE_EQ(run.lr_at(0), 0.1);
  EXPECT_DOUBLE_EQ(run.lr_at(9), 0.1);
  EXPECT_NEAR(run.lr_at(10), 0.01, 1e-17);
  EXPECT_NEAR(run.lr_at(25), 0.001, 1e-17);
  run.lr_milestones = {20, 10};
  EXPECT_THROW(run.validate(), ConfigError);
}

TEST(TrainConfig, MethodValidation) {
  EXPECT_EQ(parse_train_method("smoothmix"), TrainMethod::kSmoothMix);
  EXPECT_THROW(parse_train_method("macer"), ConfigError);
  MethodConfig mc;
  mc.method = TrainMethod::kSmoothMix;
  mc.eta = 0.0;
  EXPECT_THROW(mc.validate(), ConfigError);
}

TEST(Train, DeterministicAndLearnsSeparableBlobs) {
  Vector a(2), b(2);
  a << -2.0, 0.0;
  b << 2.0, 0.0;
  const Dataset data = gen_gaussian_blobs(200, {a, b}, 0.3, 5);
  TrainRunConfig run;
  run.epochs = 5;
  run.batch_size = 32;
  run.lr = 0.05;
  run.hidden = {8};
  run.seed = 11;
  for (TrainMethod method : {TrainMethod::kGaussian, TrainMethod::kSmoothAdv, TrainMethod::kSmoothMix}) {
    MethodConfig mc;
    mc.method = method;
    mc.sigma = 0.25;
    mc.m = 2;
    mc.adv_epsilon = 0.25;
    mc.adv_steps = 2;
    mc.adv_warmup_epochs = 2;
    const TrainResult r1 = train(data, run, mc);
    const TrainResult r2 = train(data, run, mc);
    ASSERT_EQ(r1.log.size(), 5u);
    for (std::size_t l = 0; l < r1.params.layers.size(); ++l) {
      EXPECT_EQ(r1.params.layers[l].weight, r2.params.layers[l].weight);
    }
    EXPECT_GT(clean_accuracy(r1.params, data), 0.97) << train_method_name(method);
    EXPECT_LT(r1.log.back().loss_nat, r1.log.front().loss_nat);
  }
}

}  // namespace
}  // namespace smoothmix
