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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smoothmix/nn.hpp"
#include "smoothmix/rng.hpp"

namespace smoothmix {

// Zero-mean, unit-variance coordinate distributions for delta.
enum class NoiseFamily { kGaussian, kRademacher, kUniformPm };

NoiseFamily parse_noise_family(std::string_view name);  // throws ConfigError
std::string_view noise_family_name(NoiseFamily family);
// E[r^4]: 3 (gaussian), 1 (rademacher), 9/5 (uniform on [-sqrt 3, sqrt 3]).
double fourth_moment(NoiseFamily family);

// Direction of the shift z: the first coordinate axis, or (1, ..., 1)/sqrt(d).
enum class ShiftDirection { kAxis, kDiagonal };

ShiftDirection parse_shift_direction(std::string_view name);  // throws ConfigError
std::string_view shift_direction_name(ShiftDirection direction);
Vector shift_direction_vector(ShiftDirection direction, int d);

struct TheorySimConfig {
  int d = 64;
  double sigma = 1.0;
  double tau = 1.5;
  double epsilon = 0.5;
  double p = 0.8;
  NoiseFamily family = NoiseFamily::kGaussian;
  ShiftDirection direction = ShiftDirection::kAxis;
  std::int64_t trials = 1'000'000;
  std::int64_t chunk = 1 << 14;  // trials per RNG stream
  int workers = 1;

  // sigma, tau > 0, sigma != tau, epsilon in (0, 1/2], p in (1/2, 1).
  void validate() const;
  double kurtosis_e4() const { return fourth_moment(family); }
  double eta_kurt() const;  // sqrt(E[r^4] - 1)
};

// Empirical p-quantile of |‖sigma delta‖^2 / d - sigma^2| over cfg.trials draws.
double interval_halfwidth_k(const TheorySimConfig& cfg, RngStream& rng);

// Chebyshev upper bound on k: sigma^2 eta / sqrt(d (1 - p)).
double chebyshev_k_bound(const TheorySimConfig& cfg);

struct ProbEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
};

// Frequency of ‖tau delta + z‖^2 / d in [sigma^2 - k, sigma^2 + k] with
// z = epsilon * direction / ‖direction‖. An empty direction means e_1.
// This event upper-bounds the infimum over classifiers; it is not the exact
// worst case.
ProbEstimate worst_case_prob(const TheorySimConfig& cfg, double k, const Vector& direction,
                             RngStream& rng);

struct LemmaTerms {
  double variance_term = 0.0;  // 4 sigma^4 eta^2 / ((tau^2 - sigma^2)^2 (1 - p))
  double shift_term = 0.0;     // 6 epsilon^2 / (sigma^2 + tau^2)
  double tail_term = 0.0;      // (36 tau^4 eta^2 + 144 tau^2 epsilon^2) / (sigma^2 + tau^2)^2
};

LemmaTerms lemma_terms(const TheorySimConfig& cfg);
double lemma_constant_C(const TheorySimConfig& cfg);
// Dimensions below this are outside the lemma's range.
double lemma_dimension_threshold(const TheorySimConfig& cfg);

class BelowDimensionThreshold : public std::invalid_argument {
 public:
  BelowDimensionThreshold(int d, double threshold);
  int dimension() const { return d_; }
  double threshold() const { return threshold_; }

 private:
  int d_;
  double threshold_;
};

struct DecayRow {
  int d = 0;
  double k = 0.0;
  double k_chebyshev = 0.0;
  ProbEstimate prob;
  double bound = 0.0;  // C / d
  bool pass = false;   // estimate <= C/d + 3 SE
};

struct DecayReport {
  double C = 0.0;
  double threshold = 0.0;
  std::vector<DecayRow> rows;
  bool pass = false;             // every row passes
  bool product_bounded = false;  // estimate * d <= C for every row
};

// Runs the simulation at each d (increasing, each >= the threshold). Each d
// draws from its own streams, so rows do not depend on which other dims run.
// z points along base.direction.
DecayReport verify_decay(const TheorySimConfig& base, std::span<const int> dims,
                         std::uint64_t seed);

}  // namespace smoothmix
