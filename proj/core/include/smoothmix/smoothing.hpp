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
#include <variant>
#include <vector>

#include "smoothmix/nn.hpp"
#include "smoothmix/rng.hpp"

namespace smoothmix {

struct SmoothingConfig {
  double sigma = 0.5;
  std::int64_t n0 = 100;
  std::int64_t n = 1000;
  double alpha_cert = 0.001;

  // Throws ConfigError unless sigma > 0, n >= n0 >= 1, 0 < alpha_cert < 1.
  void validate() const;
  // Largest radius CERTIFY can return with n samples:
  // sigma * Phi^-1(alpha_cert^(1/n)).
  double radius_ceiling() const;
};

// m Gaussian perturbations, stored as the columns of a d x m matrix.
struct NoiseBatch {
  Matrix deltas;
  double sigma = 0.0;
  StreamId provenance;

  int size() const { return static_cast<int>(deltas.cols()); }
  int dim() const { return static_cast<int>(deltas.rows()); }
};

// Draws a fresh stream id from `rng` and fills the batch from that child
// stream, so the batch is reproducible from its provenance alone.
NoiseBatch sample_noise(double sigma, int d, int m, RngStream& rng);
NoiseBatch regenerate_noise(double sigma, int d, int m, const StreamId& provenance);

// (1/m) sum_i softmax(F(x + delta_i)).
SoftLabel soft_smoothed_predict(const ModelParams& params, const Vector& x,
                                const NoiseBatch& noise);

// Counts of argmax F(x + delta) over `count` fresh Gaussian draws. Ties
// inside a single prediction go to the lowest class index.
std::vector<std::int64_t> hard_class_counts(const ModelParams& params,
                                            const Vector& x, std::int64_t count,
                                            double sigma, RngStream& rng);

// sigma * Phi^-1(p_lower) when p_lower > 1/2, nullopt otherwise.
std::optional<double> certified_radius(double p_lower, double sigma);

struct Certified {
  int predicted_class = 0;
  double radius = 0.0;
  double p_lower = 0.0;
};
struct Abstain {};
using CertifyOutcome = std::variant<Certified, Abstain>;

inline bool is_certified(const CertifyOutcome& o) {
  return std::holds_alternative<Certified>(o);
}

// Monte Carlo certification:
//   1. n0 draws select the top class c (lowest index on ties);
//   2. n fresh draws count hits on c;
//   3. p_lower = clopper_pearson_lower(hits, n, alpha_cert);
//   4. Certified{c, sigma * Phi^-1(p_lower), p_lower} if p_lower > 1/2,
//      otherwise Abstain.
CertifyOutcome certify(const ModelParams& params, const Vector& x,
                       const SmoothingConfig& cfg, RngStream& rng);

}  // namespace smoothmix
