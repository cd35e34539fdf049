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

#include <optional>
#include <span>
#include <vector>

#include "smoothmix/nn.hpp"
#include "smoothmix/smoothing.hpp"

namespace smoothmix {

struct AttackConfig {
  double alpha_step = 1.0;
  int steps = 4;
  // Hard l2 cap around the start point; unset means unrestricted.
  std::optional<double> epsilon_cap;

  void validate() const;
};

struct ObjectiveValue {
  double value = 0.0;
  // True when the mean true-class probability underflowed and was clamped.
  bool clamped = false;
};

// Mean true-class probabilities below this are clamped before the log.
inline constexpr double kObjectiveFloor = 1e-300;

// J(x) = -log((1/m) sum_i F_y(x + delta_i)).
ObjectiveValue attack_objective(const ModelParams& params, const Vector& x, int y,
                                const NoiseBatch& noise);

// Gradient of J w.r.t. x, taken exactly through the Monte Carlo average.
Vector attack_objective_grad(const ModelParams& params, const Vector& x, int y,
                             const NoiseBatch& noise);

// Batched evaluation of J for B examples at once; column b of `points` is
// attacked with noise[b]. All batches must share m.
struct ObjectiveBatch {
  std::vector<ObjectiveValue> values;
  std::vector<SoftLabel> fhat;  // soft-smoothed prediction at each point
  Matrix grad;                  // d x B, empty unless requested
};
ObjectiveBatch attack_objective_batch(const ModelParams& params, const Matrix& points,
                                      std::span<const int> labels,
                                      std::span<const NoiseBatch> noise, bool want_grad);

struct AttackTrajectory {
  std::vector<Vector> points;      // x~(0) = x, ..., x~(T)
  std::vector<double> objective;   // J at every point
  SoftLabel fhat_at_start = SoftLabel::uniform(1);
  NoiseBatch noise;                // the single batch reused by every step
};

// Normalized gradient ascent on J:
//   x~(t+1) = x~(t) + alpha * grad J / ||grad J||_2,
// skipping the step when ||grad J|| < 1e-12 and projecting onto the
// epsilon_cap ball around x when a cap is set.
AttackTrajectory smoothmix_attack(const ModelParams& params, const Vector& x, int y,
                                  const NoiseBatch& noise, const AttackConfig& cfg);

std::vector<AttackTrajectory> smoothmix_attack_batch(const ModelParams& params,
                                                     const Matrix& xs,
                                                     std::span<const int> labels,
                                                     std::span<const NoiseBatch> noise,
                                                     const AttackConfig& cfg);

// Projected normalized ascent on J inside the l2 ball of radius epsilon.
Vector smoothadv_pgd(const ModelParams& params, const Vector& x, int y,
                     const NoiseBatch& noise, int steps, double step_size,
                     double epsilon);

Matrix smoothadv_pgd_batch(const ModelParams& params, const Matrix& xs,
                           std::span<const int> labels, std::span<const NoiseBatch> noise,
                           int steps, double step_size, double epsilon);

// Nearest point of the closed l2 ball {p : ||p - center|| <= radius}.
Vector l2_project(const Vector& point, const Vector& center, double radius);

}  // namespace smoothmix
