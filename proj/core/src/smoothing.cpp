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

#include "smoothmix/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "smoothmix/errors.hpp"
#include "smoothmix/stats.hpp"

namespace smoothmix {

void SmoothingConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("smoothing: sigma must be > 0");
  if (n0 < 1) throw ConfigError("smoothing: n0 must be >= 1");
  if (n < n0) throw ConfigError("smoothing: n must be >= n0");
  if (!(alpha_cert > 0.0 && alpha_cert < 1.0)) {
    throw ConfigError("smoothing: alpha_cert must lie in (0,1)");
  }
}

double SmoothingConfig::radius_ceiling() const {
  return sigma * std_normal_quantile(std::pow(alpha_cert, 1.0 / static_cast<double>(n)));
}

NoiseBatch regenerate_noise(double sigma, int d, int m, const StreamId& provenance) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_noise: sigma must be > 0");
  if (m < 1) throw std::invalid_argument("sample_noise: m must be >= 1");
  if (d < 1) throw std::invalid_argument("sample_noise: d must be >= 1");
  RngStream child(provenance);
  NoiseBatch batch{Matrix(d, m), sigma, provenance};
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < d; ++i) batch.deltas(i, j) = sigma * child.normal();
  }
  return batch;
}

NoiseBatch sample_noise(double sigma, int d, int m, RngStream& rng) {
  const StreamId child{rng.id().master_seed, rng.next_u64()};
  return regenerate_noise(sigma, d, m, child);
}

SoftLabel soft_smoothed_predict(const ModelParams& params, const Vector& x,
                                const NoiseBatch& noise) {
  if (noise.dim() != x.size()) throw DimensionMismatch("noise batch", x.size(), noise.dim());
  Matrix noisy = noise.deltas.colwise() + x;
  const Matrix probs = softmax_columns(forward_batch(params, noisy));
  Vector mean = probs.rowwise().mean();
  mean /= mean.sum();
  return SoftLabel::from_probs(std::move(mean));
}

std::vector<std::int64_t> hard_class_counts(const ModelParams& params,
                                            const Vector& x, std::int64_t count,
                                            double sigma, RngStream& rng) {
  if (count < 1) throw std::invalid_argument("hard_class_counts: count must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("hard_class_counts: sigma must be > 0");
  if (x.size() != params.input_dim()) {
    throw DimensionMismatch("hard_class_counts input", params.input_dim(), x.size());
  }
  constexpr std::int64_t kChunk = 1000;
  const auto d = x.size();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(params.class_count()), 0);
  Matrix noisy(d, std::min(count, kChunk));
  for (std::int64_t done = 0; done < count;) {
    const auto take = std::min(kChunk, count - done);
    noisy.resize(d, take);
    for (Eigen::Index j = 0; j < take; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) noisy(i, j) = x[i] + sigma * rng.normal();
    }
    const Matrix logits = forward_batch(params, noisy);
    for (Eigen::Index j = 0; j < take; ++j) {
      ++counts[static_cast<std::size_t>(argmax_lowest(logits.col(j)))];
    }
    done += take;
  }
  return counts;
}

std::optional<double> certified_radius(double p_lower, double sigma) {
  if (!(p_lower > 0.5)) return std::nullopt;
  if (p_lower >= 1.0) throw std::domain_error("certified_radius: p_lower must be < 1");
  return sigma * std_normal_quantile(p_lower);
}

CertifyOutcome certify(const ModelParams& params, const Vector& x,
                       const SmoothingConfig& cfg, RngStream& rng) {
  cfg.validate();
  const auto selection = hard_class_counts(params, x, cfg.n0, cfg.sigma, rng);
  const int top = static_cast<int>(
      std::max_element(selection.begin(), selection.end()) - selection.begin());
  const auto estimation = hard_class_counts(params, x, cfg.n, cfg.sigma, rng);
  const double p_lower = clopper_pearson_lower(estimation[static_cast<std::size_t>(top)],
                                               cfg.n, cfg.alpha_cert);
  if (auto radius = certified_radius(p_lower, cfg.sigma)) {
    return Certified{top, *radius, p_lower};
  }
  return Abstain{};
}

}  // namespace smoothmix
