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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace smoothmix {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Dense ReLU network. Hidden layers apply ReLU, the last layer emits logits.
// The same shape doubles as the container for gradients and momentum.
struct ModelParams {
  std::vector<DenseLayer> layers;
  std::uint64_t init_seed = 0;

  int input_dim() const;
  int class_count() const;
  // Checks chaining of layer dimensions and finiteness; throws
  // std::invalid_argument on violation.
  void validate() const;
};

// He-uniform initialized network, biases zero.
ModelParams make_mlp(int input_dim, std::span<const int> hidden, int classes,
                     std::uint64_t seed);
ModelParams zeros_like(const ModelParams& params);
bool same_shape(const ModelParams& a, const ModelParams& b);

// Probability vector on the simplex. Construction validates it.
class SoftLabel {
 public:
  static constexpr double kSumTolerance = 1e-9;

  static SoftLabel from_probs(Vector probs);
  static SoftLabel one_hot(int cls, int class_count);
  static SoftLabel uniform(int class_count);

  const Vector& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int c) const { return probs_[c]; }
  // Lowest index among the maxima.
  int argmax() const;

 private:
  explicit SoftLabel(Vector probs) : probs_(std::move(probs)) {}
  Vector probs_;
};

// ---- forward ----------------------------------------------------------------

Vector forward(const ModelParams& params, const Vector& x);
// Column-batched forward: each column of `xs` is one input.
Matrix forward_batch(const ModelParams& params, const Matrix& xs);

// Argmax with ties broken toward the lowest class index.
int argmax_lowest(const Eigen::Ref<const Vector>& v);

SoftLabel softmax(const Vector& logits);
// Column-wise softmax, max-subtracted.
Matrix softmax_columns(const Matrix& logits);

// -sum_c target_c * log softmax(logits)_c, via log-sum-exp.
double cross_entropy(const Vector& logits, const SoftLabel& target);
double entropy(const SoftLabel& p);

// ---- backprop -----------------------------------------------------------------

// Activations kept from a batched forward pass, needed for backprop.
struct ForwardPass {
  std::vector<Matrix> inputs;  // input to layer k (inputs[0] = xs)
  std::vector<Matrix> pre;     // pre-activation of layer k
  const Matrix& logits() const { return pre.back(); }
};

ForwardPass forward_pass(const ModelParams& params, const Matrix& xs);

struct Backprop {
  ModelParams param_grad;  // empty layers when not requested
  Matrix input_grad;       // d x B, empty when not requested
};

// Pulls d(loss)/d(logits) back through the network. ReLU'(0) := 0.
Backprop backward(const ModelParams& params, const ForwardPass& pass,
                  const Matrix& dlogits, bool want_params, bool want_input);

// loss = sum_j weights[j] * CE(F(xs_j), targets_j), with its gradients.
struct WeightedCrossEntropy {
  double loss = 0.0;
  Vector per_column;  // unweighted CE of each column
  Backprop grad;
};
WeightedCrossEntropy weighted_cross_entropy(const ModelParams& params,
                                            const Matrix& xs,
                                            const Matrix& targets,
                                            const Vector& weights,
                                            bool want_params,
                                            bool want_input);

struct LabeledPoint {
  Vector x;
  SoftLabel target;
};

// Mean cross-entropy gradient over the batch w.r.t. all parameters.
ModelParams grad_params(const ModelParams& params,
                        std::span<const LabeledPoint> batch);
// Cross-entropy gradient w.r.t. the input.
Vector grad_input(const ModelParams& params, const Vector& x,
                  const SoftLabel& target);

// ---- optimizer ----------------------------------------------------------------

struct OptimizerState {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  ModelParams velocity;

  static OptimizerState for_params(const ModelParams& params, double lr,
                                   double momentum, double weight_decay);
};

// SGD with Nesterov momentum, no dampening:
//   g' = g + weight_decay * theta
//   v  = momentum * v + g'
//   theta -= lr * (g' + momentum * v)
void sgd_nesterov_step(ModelParams& params, const ModelParams& grads,
                       OptimizerState& state);

}  // namespace smoothmix
