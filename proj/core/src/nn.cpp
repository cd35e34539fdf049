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

#include "smoothmix/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "smoothmix/errors.hpp"
#include "smoothmix/rng.hpp"

namespace smoothmix {

int ModelParams::input_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
}

int ModelParams::class_count() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
}

void ModelParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("model has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    if (layer.bias.size() != layer.weight.rows()) {
      throw DimensionMismatch("layer " + std::to_string(k) + " bias",
                              layer.weight.rows(), layer.bias.size());
    }
    if (k > 0 && layer.weight.cols() != layers[k - 1].weight.rows()) {
      throw DimensionMismatch("layer " + std::to_string(k) + " input",
                              layers[k - 1].weight.rows(), layer.weight.cols());
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw std::invalid_argument("layer " + std::to_string(k) +
                                  " has non-finite entries");
    }
  }
}

ModelParams make_mlp(int input_dim, std::span<const int> hidden, int classes,
                     std::uint64_t seed) {
  if (input_dim <= 0 || classes <= 0) {
    throw std::invalid_argument("make_mlp: dimensions must be positive");
  }
  RngStream rng(seed, "init", 0);
  ModelParams params;
  params.init_seed = seed;
  int fan_in = input_dim;
  auto add_layer = [&](int fan_out) {
    const double bound = std::sqrt(6.0 / fan_in);
    DenseLayer layer{Matrix(fan_out, fan_in), Vector::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    params.layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (int width : hidden) {
    if (width <= 0) throw std::invalid_argument("make_mlp: hidden width must be positive");
    add_layer(width);
  }
  add_layer(classes);
  return params;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams out;
  out.init_seed = params.init_seed;
  out.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    out.layers.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                          Vector::Zero(layer.bias.size())});
  }
  return out;
}

bool same_shape(const ModelParams& a, const ModelParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    if (a.layers[k].weight.rows() != b.layers[k].weight.rows() ||
        a.layers[k].weight.cols() != b.layers[k].weight.cols() ||
        a.layers[k].bias.size() != b.layers[k].bias.size()) {
      return false;
    }
  }
  return true;
}

// ---- SoftLabel ----------------------------------------------------------------

SoftLabel SoftLabel::from_probs(Vector probs) {
  if (probs.size() == 0) throw std::invalid_argument("SoftLabel: empty");
  for (Eigen::Index c = 0; c < probs.size(); ++c) {
    if (!(probs[c] >= 0.0 && probs[c] <= 1.0)) {
      throw std::invalid_argument("SoftLabel: entry " + std::to_string(c) +
                                  " outside [0,1]");
    }
  }
  if (std::abs(probs.sum() - 1.0) > kSumTolerance) {
    throw std::invalid_argument("SoftLabel: entries sum to " +
                                std::to_string(probs.sum()));
  }
  return SoftLabel(std::move(probs));
}

SoftLabel SoftLabel::one_hot(int cls, int class_count) {
  if (cls < 0 || cls >= class_count) {
    throw std::invalid_argument("SoftLabel::one_hot: class out of range");
  }
  Vector p = Vector::Zero(class_count);
  p[cls] = 1.0;
  return SoftLabel(std::move(p));
}

SoftLabel SoftLabel::uniform(int class_count) {
  if (class_count <= 0) throw std::invalid_argument("SoftLabel::uniform: C must be positive");
  return SoftLabel(Vector::Constant(class_count, 1.0 / class_count));
}

int SoftLabel::argmax() const { return argmax_lowest(probs_); }

// ---- forward ----------------------------------------------------------------

namespace {

void check_input(const ModelParams& params, Eigen::Index rows) {
  if (params.layers.empty()) throw std::invalid_argument("model has no layers");
  if (rows != params.input_dim()) {
    throw DimensionMismatch("network input", params.input_dim(), rows);
  }
}

}  // namespace

Matrix forward_batch(const ModelParams& params, const Matrix& xs) {
  check_input(params, xs.rows());
  Matrix a = xs;
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const auto& layer = params.layers[k];
    Matrix z = layer.weight * a;
    z.colwise() += layer.bias;
    if (k + 1 < params.layers.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Vector forward(const ModelParams& params, const Vector& x) {
  return forward_batch(params, x);
}

int argmax_lowest(const Eigen::Ref<const Vector>& v) {
  int best = 0;
  for (Eigen::Index c = 1; c < v.size(); ++c) {
    if (v[c] > v[best]) best = static_cast<int>(c);
  }
  return best;
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double peak = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - peak).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

SoftLabel softmax(const Vector& logits) {
  if (!logits.allFinite()) throw std::invalid_argument("softmax: non-finite logits");
  return SoftLabel::from_probs(softmax_columns(logits).col(0));
}

namespace {

double log_sum_exp(const Eigen::Ref<const Vector>& z) {
  const double peak = z.maxCoeff();
  return peak + std::log((z.array() - peak).exp().sum());
}

}  // namespace

double cross_entropy(const Vector& logits, const SoftLabel& target) {
  if (logits.size() != target.size()) {
    throw DimensionMismatch("cross_entropy target", logits.size(), target.size());
  }
  const double lse = log_sum_exp(logits);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < logits.size(); ++c) {
    if (target[c] > 0.0) loss -= target[c] * (logits[c] - lse);
  }
  return loss;
}

double entropy(const SoftLabel& p) {
  double h = 0.0;
  for (int c = 0; c < p.size(); ++c) {
    if (p[c] > 0.0) h -= p[c] * std::log(p[c]);
  }
  return h;
}

// ---- backprop -----------------------------------------------------------------

ForwardPass forward_pass(const ModelParams& params, const Matrix& xs) {
  check_input(params, xs.rows());
  ForwardPass pass;
  pass.inputs.reserve(params.layers.size());
  pass.pre.reserve(params.layers.size());
  pass.inputs.push_back(xs);
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const auto& layer = params.layers[k];
    Matrix z = layer.weight * pass.inputs.back();
    z.colwise() += layer.bias;
    if (k + 1 < params.layers.size()) pass.inputs.push_back(z.cwiseMax(0.0));
    pass.pre.push_back(std::move(z));
  }
  return pass;
}

Backprop backward(const ModelParams& params, const ForwardPass& pass,
                  const Matrix& dlogits, bool want_params, bool want_input) {
  const std::size_t depth = params.layers.size();
  if (dlogits.rows() != pass.logits().rows() || dlogits.cols() != pass.logits().cols()) {
    throw DimensionMismatch("backward dlogits", pass.logits().size(), dlogits.size());
  }
  Backprop out;
  if (want_params) out.param_grad = zeros_like(params);

  Matrix delta = dlogits;  // d loss / d pre-activation of the current layer
  for (std::size_t k = depth; k-- > 0;) {
    const auto& layer = params.layers[k];
    if (want_params) {
      out.param_grad.layers[k].weight.noalias() = delta * pass.inputs[k].transpose();
      out.param_grad.layers[k].bias = delta.rowwise().sum();
    }
    if (k == 0 && !want_input) break;
    Matrix upstream = layer.weight.transpose() * delta;
    if (k == 0) {
      out.input_grad = std::move(upstream);
      break;
    }
    const Matrix& pre = pass.pre[k - 1];
    delta = (pre.array() > 0.0).select(upstream, 0.0);
  }
  return out;
}

WeightedCrossEntropy weighted_cross_entropy(const ModelParams& params,
                                            const Matrix& xs,
                                            const Matrix& targets,
                                            const Vector& weights,
                                            bool want_params,
                                            bool want_input) {
  if (targets.cols() != xs.cols()) {
    throw DimensionMismatch("weighted_cross_entropy targets", xs.cols(), targets.cols());
  }
  if (weights.size() != xs.cols()) {
    throw DimensionMismatch("weighted_cross_entropy weights", xs.cols(), weights.size());
  }
  const ForwardPass pass = forward_pass(params, xs);
  const Matrix& logits = pass.logits();
  if (targets.rows() != logits.rows()) {
    throw DimensionMismatch("weighted_cross_entropy classes", logits.rows(), targets.rows());
  }
  WeightedCrossEntropy out;
  Matrix probs = softmax_columns(logits);
  out.per_column = Vector(xs.cols());
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const double lse = log_sum_exp(logits.col(j));
    double ce = 0.0;
    for (Eigen::Index c = 0; c < logits.rows(); ++c) {
      if (targets(c, j) > 0.0) ce -= targets(c, j) * (logits(c, j) - lse);
    }
    out.per_column[j] = ce;
    out.loss += weights[j] * ce;
  }
  if (want_params || want_input) {
    // dCE/dz = softmax(z) * sum(t) - t; targets sum to one.
    Matrix dlogits = (probs - targets) * weights.asDiagonal();
    out.grad = backward(params, pass, dlogits, want_params, want_input);
  }
  return out;
}

ModelParams grad_params(const ModelParams& params,
                        std::span<const LabeledPoint> batch) {
  if (batch.empty()) throw std::invalid_argument("grad_params: empty batch");
  const int d = params.input_dim();
  const int classes = params.class_count();
  Matrix xs(d, static_cast<Eigen::Index>(batch.size()));
  Matrix targets(classes, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (batch[j].x.size() != d) throw DimensionMismatch("grad_params input", d, batch[j].x.size());
    if (batch[j].target.size() != classes) {
      throw DimensionMismatch("grad_params target", classes, batch[j].target.size());
    }
    xs.col(static_cast<Eigen::Index>(j)) = batch[j].x;
    targets.col(static_cast<Eigen::Index>(j)) = batch[j].target.probs();
  }
  const Vector weights = Vector::Constant(xs.cols(), 1.0 / static_cast<double>(batch.size()));
  return weighted_cross_entropy(params, xs, targets, weights, true, false).grad.param_grad;
}

Vector grad_input(const ModelParams& params, const Vector& x, const SoftLabel& target) {
  if (target.size() != params.class_count()) {
    throw DimensionMismatch("grad_input target", params.class_count(), target.size());
  }
  const Vector weights = Vector::Ones(1);
  return weighted_cross_entropy(params, x, target.probs(), weights, false, true)
      .grad.input_grad.col(0);
}

// ---- optimizer ----------------------------------------------------------------

OptimizerState OptimizerState::for_params(const ModelParams& params, double lr,
                                          double momentum, double weight_decay) {
  if (!(lr >= 0.0)) throw std::invalid_argument("optimizer: lr must be nonnegative");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("optimizer: momentum must lie in [0,1)");
  }
  if (!(weight_decay >= 0.0)) {
    throw std::invalid_argument("optimizer: weight_decay must be nonnegative");
  }
  return OptimizerState{lr, momentum, weight_decay, zeros_like(params)};
}

void sgd_nesterov_step(ModelParams& params, const ModelParams& grads,
                       OptimizerState& state) {
  if (!same_shape(params, grads)) {
    throw std::invalid_argument("sgd_nesterov_step: gradient shape differs from parameters");
  }
  if (!same_shape(params, state.velocity)) {
    throw std::invalid_argument("sgd_nesterov_step: velocity shape differs from parameters");
  }
  const double mu = state.momentum;
  auto update = [&](auto& theta, const auto& g, auto& v) {
    auto g_eff = (g + state.weight_decay * theta).eval();
    v = mu * v + g_eff;
    theta -= state.lr * (g_eff + mu * v);
  };
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    update(params.layers[k].weight, grads.layers[k].weight, state.velocity.layers[k].weight);
    update(params.layers[k].bias, grads.layers[k].bias, state.velocity.layers[k].bias);
  }
}

}  // namespace smoothmix
