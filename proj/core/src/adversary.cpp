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

#include "smoothmix/adversary.hpp"

#include <cmath>
#include <stdexcept>

#include "smoothmix/errors.hpp"

namespace smoothmix {

namespace {

constexpr double kMinGradNorm = 1e-12;

void check_batch(const Matrix& points, std::span<const int> labels,
                 std::span<const NoiseBatch> noise) {
  const auto batch = points.cols();
  if (static_cast<Eigen::Index>(labels.size()) != batch) {
    throw DimensionMismatch("attack labels", batch, static_cast<long>(labels.size()));
  }
  if (static_cast<Eigen::Index>(noise.size()) != batch) {
    throw DimensionMismatch("attack noise batches", batch, static_cast<long>(noise.size()));
  }
  for (const auto& n : noise) {
    if (n.size() < 1) throw std::invalid_argument("attack: empty noise batch");
    if (n.size() != noise.front().size()) {
      throw DimensionMismatch("attack noise size", noise.front().size(), n.size());
    }
    if (n.dim() != points.rows()) throw DimensionMismatch("attack noise", points.rows(), n.dim());
  }
}

void ascent_step(Vector& point, const Eigen::Ref<const Vector>& grad, double alpha) {
  const double norm = grad.norm();
  if (norm < kMinGradNorm) return;
  point += (alpha / norm) * grad;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(alpha_step > 0.0)) throw ConfigError("attack: alpha_step must be > 0");
  if (steps < 0) throw ConfigError("attack: steps must be >= 0");
  if (epsilon_cap && !(*epsilon_cap > 0.0)) throw ConfigError("attack: epsilon_cap must be > 0");
}

ObjectiveBatch attack_objective_batch(const ModelParams& params, const Matrix& points,
                                      std::span<const int> labels,
                                      std::span<const NoiseBatch> noise, bool want_grad) {
  check_batch(points, labels, noise);
  const auto batch = points.cols();
  const int m = noise.empty() ? 0 : noise.front().size();
  const int classes = params.class_count();

  Matrix noisy(points.rows(), batch * m);
  for (Eigen::Index b = 0; b < batch; ++b) {
    noisy.middleCols(b * m, m) = noise[static_cast<std::size_t>(b)].deltas.colwise() + points.col(b);
  }
  const ForwardPass pass = forward_pass(params, noisy);
  const Matrix probs = softmax_columns(pass.logits());

  ObjectiveBatch out;
  out.values.reserve(static_cast<std::size_t>(batch));
  out.fhat.reserve(static_cast<std::size_t>(batch));
  Matrix dlogits;
  if (want_grad) dlogits = Matrix::Zero(classes, batch * m);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int y = labels[static_cast<std::size_t>(b)];
    if (y < 0 || y >= classes) throw std::invalid_argument("attack: label out of range");
    auto block = probs.middleCols(b * m, m);
    Vector mean = block.rowwise().mean();
    const double mean_true = mean[y];
    ObjectiveValue value;
    const double guarded = std::max(mean_true, kObjectiveFloor);
    value.clamped = mean_true < kObjectiveFloor;
    value.value = -std::log(guarded);
    out.values.push_back(value);
    mean /= mean.sum();
    out.fhat.push_back(SoftLabel::from_probs(std::move(mean)));
    if (want_grad) {
      // dJ/dz_i = -(1 / (m * mean)) * s_y,i * (e_y - s_i)
      const double scale = -1.0 / (static_cast<double>(m) * guarded);
      for (int i = 0; i < m; ++i) {
        const Eigen::Index col = b * m + i;
        const double s_y = probs(y, col);
        dlogits.col(col) = (scale * s_y) * (-probs.col(col));
        dlogits(y, col) += scale * s_y;
      }
    }
  }
  if (want_grad) {
    const Backprop bp = backward(params, pass, dlogits, false, true);
    out.grad = Matrix(points.rows(), batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      out.grad.col(b) = bp.input_grad.middleCols(b * m, m).rowwise().sum();
    }
  }
  return out;
}

ObjectiveValue attack_objective(const ModelParams& params, const Vector& x, int y,
                                const NoiseBatch& noise) {
  const int labels[] = {y};
  return attack_objective_batch(params, x, labels, {&noise, 1}, false).values.front();
}

Vector attack_objective_grad(const ModelParams& params, const Vector& x, int y,
                             const NoiseBatch& noise) {
  const int labels[] = {y};
  return attack_objective_batch(params, x, labels, {&noise, 1}, true).grad.col(0);
}

std::vector<AttackTrajectory> smoothmix_attack_batch(const ModelParams& params,
                                                     const Matrix& xs,
                                                     std::span<const int> labels,
                                                     std::span<const NoiseBatch> noise,
                                                     const AttackConfig& cfg) {
  cfg.validate();
  check_batch(xs, labels, noise);
  const auto batch = xs.cols();
  std::vector<AttackTrajectory> out(static_cast<std::size_t>(batch));
  for (Eigen::Index b = 0; b < batch; ++b) {
    auto& traj = out[static_cast<std::size_t>(b)];
    traj.noise = noise[static_cast<std::size_t>(b)];
    traj.points.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    traj.points.push_back(xs.col(b));
  }
  Matrix current = xs;
  for (int t = 0; t <= cfg.steps; ++t) {
    const bool stepping = t < cfg.steps;
    const ObjectiveBatch eval = attack_objective_batch(params, current, labels, noise, stepping);
    for (Eigen::Index b = 0; b < batch; ++b) {
      auto& traj = out[static_cast<std::size_t>(b)];
      traj.objective.push_back(eval.values[static_cast<std::size_t>(b)].value);
      if (t == 0) traj.fhat_at_start = eval.fhat[static_cast<std::size_t>(b)];
      if (!stepping) continue;
      Vector next = current.col(b);
      ascent_step(next, eval.grad.col(b), cfg.alpha_step);
      if (cfg.epsilon_cap) next = l2_project(next, xs.col(b), *cfg.epsilon_cap);
      current.col(b) = next;
      traj.points.push_back(std::move(next));
    }
  }
  return out;
}

AttackTrajectory smoothmix_attack(const ModelParams& params, const Vector& x, int y,
                                  const NoiseBatch& noise, const AttackConfig& cfg) {
  const int labels[] = {y};
  return std::move(smoothmix_attack_batch(params, x, labels, {&noise, 1}, cfg).front());
}

Matrix smoothadv_pgd_batch(const ModelParams& params, const Matrix& xs,
                           std::span<const int> labels, std::span<const NoiseBatch> noise,
                           int steps, double step_size, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("smoothadv_pgd: epsilon must be > 0");
  if (steps < 0) throw std::invalid_argument("smoothadv_pgd: steps must be >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("smoothadv_pgd: step_size must be > 0");
  Matrix current = xs;
  for (int t = 0; t < steps; ++t) {
    const ObjectiveBatch eval = attack_objective_batch(params, current, labels, noise, true);
    for (Eigen::Index b = 0; b < xs.cols(); ++b) {
      Vector next = current.col(b);
      ascent_step(next, eval.grad.col(b), step_size);
      current.col(b) = l2_project(next, xs.col(b), epsilon);
    }
  }
  return current;
}

Vector smoothadv_pgd(const ModelParams& params, const Vector& x, int y,
                     const NoiseBatch& noise, int steps, double step_size,
                     double epsilon) {
  const int labels[] = {y};
  return smoothadv_pgd_batch(params, x, labels, {&noise, 1}, steps, step_size, epsilon).col(0);
}

Vector l2_project(const Vector& point, const Vector& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("l2_project: radius must be > 0");
  if (point.size() != center.size()) {
    throw DimensionMismatch("l2_project", center.size(), point.size());
  }
  const Vector offset = point - center;
  const double dist = offset.norm();
  if (dist <= radius) return point;
  return center + (radius / dist) * offset;
}

}  // namespace smoothmix
