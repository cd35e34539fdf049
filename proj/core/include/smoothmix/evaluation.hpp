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
#include <string>
#include <vector>

#include "smoothmix/nn.hpp"
#include "smoothmix/rng.hpp"
#include "smoothmix/smoothing.hpp"

namespace smoothmix {

struct CertifiedRow {
  int label = 0;
  CertifyOutcome outcome = Abstain{};
};

struct CertifiedResultSet {
  std::vector<CertifiedRow> rows;
  SmoothingConfig smoothing;
  std::string model_id;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when empty or a radius is negative.
  void validate() const;
};

// Radius of a correct, certified row; 0 for wrong or abstained rows.
double correct_radius(const CertifiedRow& row);

// Average certified radius over all rows, counting only correct predictions.
double acr(const CertifiedResultSet& results);

// Fraction of rows certified correctly with radius >= r, for each r.
// Throws std::invalid_argument unless radii are nondecreasing.
std::vector<double> certified_accuracy_curve(const CertifiedResultSet& results,
                                             std::span<const double> radii);

enum class MixRatioStatus {
  kFound,
  kNoFlip,         // even x_adv keeps the prediction y
  kMisclassified,  // the smoothed prediction at x is already wrong
};

struct MixRatio {
  MixRatioStatus status = MixRatioStatus::kNoFlip;
  double lambda = 0.0;  // meaningful only when found()

  bool found() const { return status == MixRatioStatus::kFound; }
};

inline constexpr int kMixRatioGrid = 101;

// Smallest lambda on the grid {0, 0.01, ..., 1} at which the soft-smoothed
// argmax at (1 - lambda) x + lambda x_adv differs from y. x_adv comes from
// projected PGD (pgd_steps steps of length 2 eps / steps) with its own noise;
// the scan uses a separate fixed batch of estimation_m noise vectors.
MixRatio equal_confidence_mixing_ratio(const ModelParams& params, const Vector& x, int y,
                                       double sigma, int pgd_steps, double pgd_eps,
                                       int estimation_m, RngStream& rng);

// Same scan with caller-supplied x_adv and estimation noise.
MixRatio scan_mixing_ratio(const ModelParams& params, const Vector& x, int y,
                           const Vector& x_adv, const NoiseBatch& estimation);

struct PointConfidence {
  double true_class = 0.0;
  double max_off_class = 0.0;
};

// Hard-prediction class frequencies of f(x + delta) over m draws.
PointConfidence point_confidence(const ModelParams& params, const Vector& x, int y,
                                 double sigma, int m, RngStream& rng);

struct ConfidenceStats {
  double true_class = 0.0;
  double max_off_class = 0.0;
  // Monte Carlo standard errors of the two means (binomial, per point).
  double true_class_se = 0.0;
  double max_off_class_se = 0.0;
  int points = 0;
};

// Dataset means of point_confidence. xs holds one point per column.
ConfidenceStats confidence_stats(const ModelParams& params, const Matrix& xs,
                                 std::span<const int> labels, double sigma, int m,
                                 RngStream& rng);

// Aggregates per-point confidences computed elsewhere (e.g. in parallel).
ConfidenceStats summarize_confidence(std::span<const PointConfidence> points, int m);

}  // namespace smoothmix
