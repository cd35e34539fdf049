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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smoothmix/adversary.hpp"
#include "smoothmix/data.hpp"
#include "smoothmix/nn.hpp"
#include "smoothmix/rng.hpp"
#include "smoothmix/smoothing.hpp"

namespace smoothmix {

enum class TrainMethod { kGaussian, kSmoothAdv, kSmoothMix };

TrainMethod parse_train_method(std::string_view name);  // throws ConfigError
std::string_view train_method_name(TrainMethod method);

struct SmoothMixConfig {
  double eta = 5.0;
  AttackConfig attack;
  int m = 4;
  bool use_one_step = false;
  // When set, x~(1) is projected onto this l2 ball around x before it
  // replaces the clean anchor.
  std::optional<double> one_step_cap;
  double sigma = 0.5;

  void validate() const;
};

// Projected attack used by SmoothAdv training. The radius ramps linearly
// over the first warmup_epochs epochs: epsilon * (e + 1) / warmup_epochs.
struct SmoothAdvConfig {
  double epsilon = 1.0;
  int steps = 10;
  int warmup_epochs = 10;
  int m = 4;
  double sigma = 0.5;

  void validate() const;
  double effective_epsilon(int epoch) const;
  // Step length of the normalized ascent: 2 * effective_epsilon / steps.
  double step_size(int epoch) const;
};

struct MixPair {
  Vector x_mix;
  SoftLabel y_mix = SoftLabel::uniform(1);
  double lambda = 0.0;
};

// (1/m) sum_i CE(F(x + delta_i), onehot(y)).
double gaussian_loss(const ModelParams& params, const Vector& x, int y,
                     const NoiseBatch& noise);

// x_mix = (1 - lambda) x_base + lambda x_adv,
// y_mix = (1 - lambda) fhat_base + lambda * 1/C.
// Throws std::invalid_argument unless lambda lies in [0, 1/2].
MixPair make_mix_pair(const Vector& x_base, const SoftLabel& fhat_base,
                      const Vector& x_adv, double lambda, int class_count);

// (1/m) sum_i CE(F(x_mix + delta_i), y_mix). y_mix is a constant target.
double smoothmix_loss(const ModelParams& params, const MixPair& pair,
                      const NoiseBatch& noise);

struct SmoothMixDiagnostics {
  double lambda = 0.0;
  double loss_nat = 0.0;
  double loss_mix = 0.0;
  std::vector<double> objective;  // J along the attack trajectory
  Vector anchor;                  // x, or x~(1) with the one-step variant
  Vector x_adv;                   // x~(T)
  MixPair pair;
  NoiseBatch noise;
};

struct SmoothMixLoss {
  double total = 0.0;  // loss_nat + eta * loss_mix
  SmoothMixDiagnostics diagnostics;
};

// One example through the full SmoothMix objective: draw m noise vectors and
// lambda ~ U[0, 1/2] from `rng`, attack the soft-smoothed classifier, build
// the mix pair and return L_nat + eta * L_mix.
SmoothMixLoss smoothmix_batch_loss(const ModelParams& params, const Vector& x, int y,
                                   const SmoothMixConfig& cfg, RngStream& rng);

// Mean loss over a minibatch with the parameter gradient. Example b draws
// all of its randomness from rngs[b].
struct MinibatchLoss {
  double loss = 0.0;
  double loss_nat = 0.0;
  double loss_mix = 0.0;
  ModelParams grad;
  std::vector<SmoothMixDiagnostics> diagnostics;  // smoothmix only
};

MinibatchLoss gaussian_minibatch(const ModelParams& params, const Matrix& xs,
                                 std::span<const int> labels, double sigma, int m,
                                 std::span<RngStream> rngs);
MinibatchLoss smoothadv_minibatch(const ModelParams& params, const Matrix& xs,
                                  std::span<const int> labels, const SmoothAdvConfig& cfg,
                                  int epoch, std::span<RngStream> rngs);
MinibatchLoss smoothmix_minibatch(const ModelParams& params, const Matrix& xs,
                                  std::span<const int> labels, const SmoothMixConfig& cfg,
                                  std::span<RngStream> rngs, bool keep_diagnostics = false);

struct TrainRunConfig {
  int epochs = 50;
  int batch_size = 64;
  double lr = 0.01;
  std::vector<int> lr_milestones;
  double lr_gamma = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64, 64};

  void validate() const;
  // lr * lr_gamma^(number of milestones <= epoch)
  double lr_at(int epoch) const;
};

struct MethodConfig {
  TrainMethod method = TrainMethod::kGaussian;
  double sigma = 0.5;
  int m = 4;
  double eta = 5.0;
  AttackConfig attack;
  bool use_one_step = false;
  std::optional<double> one_step_cap;
  double adv_epsilon = 1.0;
  int adv_steps = 10;
  int adv_warmup_epochs = 10;

  SmoothMixConfig smoothmix() const;
  SmoothAdvConfig smoothadv() const;
  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double loss_nat = 0.0;
  double loss_mix = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

// Minibatch SGD (Nesterov) over the selected loss. Example i of epoch e draws
// its noise and lambda from stream (seed, "train/example", e * N + i), and the
// epoch order from (seed, "train/shuffle", e). Starts from `init` when given,
// otherwise from make_mlp(d, hidden, C, seed).
TrainResult train(const Dataset& data, const TrainRunConfig& run, const MethodConfig& method,
                  std::optional<ModelParams> init = std::nullopt);

double clean_accuracy(const ModelParams& params, const Dataset& data);

}  // namespace smoothmix
