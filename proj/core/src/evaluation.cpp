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

#include "smoothmix/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smoothmix/adversary.hpp"
#include "smoothmix/errors.hpp"

namespace smoothmix {

void CertifiedResultSet::validate() const {
  if (rows.empty()) throw std::invalid_argument("certified result set is empty");
  for (const auto& row : rows) {
    if (const auto* c = std::get_if<Certified>(&row.outcome); c && !(c->radius >= 0.0)) {
      throw std::invalid_argument("certified result set: negative radius");
    }
  }
}

double correct_radius(const CertifiedRow& row) {
  const auto* c = std::get_if<Certified>(&row.outcome);
  if (c == nullptr || c->predicted_class != row.label) return 0.0;
  return c->radius;
}

double acr(const CertifiedResultSet& results) {
  results.validate();
  double total = 0.0;
  for (const auto& row : results.rows) total += correct_radius(row);
  return total / static_cast<double>(results.rows.size());
}

std::vector<double> certified_accuracy_curve(const CertifiedResultSet& results,
                                             std::span<const double> radii) {
  results.validate();
  if (!std::is_sorted(radii.begin(), radii.end())) {
    throw std::invalid_argument("certified_accuracy_curve: radii must be nondecreasing");
  }
  std::vector<double> curve;
  curve.reserve(radii.size());
  for (double r : radii) {
    std::size_t hits = 0;
    for (const auto& row : results.rows) {
      const auto* c = std::get_if<Certified>(&row.outcome);
      if (c != nullptr && c->predicted_class == row.label && c->radius >= r) ++hits;
    }
    curve.push_back(static_cast<double>(hits) / static_cast<double>(results.rows.size()));
  }
  return curve;
}

MixRatio scan_mixing_ratio(const ModelParams& params, const Vector& x, int y,
                           const Vector& x_adv, const NoiseBatch& estimation) {
  if (x_adv.size() != x.size()) throw DimensionMismatch("mixing ratio x_adv", x.size(), x_adv.size());
  if (estimation.dim() != x.size()) {
    throw DimensionMismatch("mixing ratio noise", x.size(), estimation.dim());
  }
  const int m = estimation.size();
  Matrix noisy(x.size(), static_cast<Eigen::Index>(kMixRatioGrid) * m);
  for (int g = 0; g < kMixRatioGrid; ++g) {
    const double lambda = static_cast<double>(g) / (kMixRatioGrid - 1);
    const Vector point = (1.0 - lambda) * x + lambda * x_adv;
    noisy.middleCols(static_cast<Eigen::Index>(g) * m, m) = estimation.deltas.colwise() + point;
  }
  const Matrix probs = softmax_columns(forward_batch(params, noisy));
  for (int g = 0; g < kMixRatioGrid; ++g) {
    const Vector mean = probs.middleCols(static_cast<Eigen::Index>(g) * m, m).rowwise().mean();
    if (argmax_lowest(mean) != y) {
      if (g == 0) return {MixRatioStatus::kMisclassified, 0.0};
      return {MixRatioStatus::kFound, static_cast<double>(g) / (kMixRatioGrid - 1)};
    }
  }
  return {MixRatioStatus::kNoFlip, 0.0};
}

MixRatio equal_confidence_mixing_ratio(const ModelParams& params, const Vector& x, int y,
                                       double sigma, int pgd_steps, double pgd_eps,
                                       int estimation_m, RngStream& rng) {
  if (pgd_steps < 1) throw std::invalid_argument("mixing ratio: pgd_steps must be >= 1");
  const int d = static_cast<int>(x.size());
  const NoiseBatch attack_noise = sample_noise(sigma, d, estimation_m, rng);
  const NoiseBatch estimation = sample_noise(sigma, d, estimation_m, rng);
  if (soft_smoothed_predict(params, x, estimation).argmax() != y) {
    return {MixRatioStatus::kMisclassified, 0.0};
  }
  const Vector x_adv = smoothadv_pgd(params, x, y, attack_noise, pgd_steps,
                                     2.0 * pgd_eps / pgd_steps, pgd_eps);
  return scan_mixing_ratio(params, x, y, x_adv, estimation);
}

PointConfidence point_confidence(const ModelParams& params, const Vector& x, int y,
                                 double sigma, int m, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("point_confidence: m must be >= 1");
  const auto counts = hard_class_counts(params, x, m, sigma, rng);
  std::int64_t off = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (static_cast<int>(c) != y) off = std::max(off, counts[c]);
  }
  return {static_cast<double>(counts[static_cast<std::size_t>(y)]) / m,
          static_cast<double>(off) / m};
}

ConfidenceStats summarize_confidence(std::span<const PointConfidence> points, int m) {
  ConfidenceStats s;
  s.points = static_cast<int>(points.size());
  if (points.empty()) return s;
  double var_true = 0.0;
  double var_off = 0.0;
  for (const auto& p : points) {
    s.true_class += p.true_class;
    s.max_off_class += p.max_off_class;
    var_true += p.true_class * (1.0 - p.true_class) / m;
    var_off += p.max_off_class * (1.0 - p.max_off_class) / m;
  }
  const double n = static_cast<double>(points.size());
  s.true_class /= n;
  s.max_off_class /= n;
  s.true_class_se = std::sqrt(var_true) / n;
  s.max_off_class_se = std::sqrt(var_off) / n;
  return s;
}

ConfidenceStats confidence_stats(const ModelParams& params, const Matrix& xs,
                                 std::span<const int> labels, double sigma, int m,
                                 RngStream& rng) {
  if (static_cast<Eigen::Index>(labels.size()) != xs.cols()) {
    throw DimensionMismatch("confidence_stats labels", xs.cols(), static_cast<long>(labels.size()));
  }
  std::vector<PointConfidence> points;
  points.reserve(labels.size());
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    points.push_back(point_confidence(params, xs.col(j), labels[static_cast<std::size_t>(j)],
                                      sigma, m, rng));
  }
  return summarize_confidence(points, m);
}

}  // namespace smoothmix
