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

#include "smoothmix/theory.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "smoothmix/errors.hpp"

namespace smoothmix {

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "rademacher") return NoiseFamily::kRademacher;
  if (name == "uniform_pm") return NoiseFamily::kUniformPm;
  throw ConfigError("unknown noise family '" + std::string(name) + "'");
}

std::string_view noise_family_name(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian: return "gaussian";
    case NoiseFamily::kRademacher: return "rademacher";
    case NoiseFamily::kUniformPm: return "uniform_pm";
  }
  return "unknown";
}

double fourth_moment(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian: return 3.0;
    case NoiseFamily::kRademacher: return 1.0;
    case NoiseFamily::kUniformPm: return 1.8;
  }
  return 0.0;
}

ShiftDirection parse_shift_direction(std::string_view name) {
  if (name == "axis") return ShiftDirection::kAxis;
  if (name == "diagonal") return ShiftDirection::kDiagonal;
  throw ConfigError("unknown shift direction '" + std::string(name) + "'");
}

std::string_view shift_direction_name(ShiftDirection direction) {
  return direction == ShiftDirection::kAxis ? "axis" : "diagonal";
}

Vector shift_direction_vector(ShiftDirection direction, int d) {
  if (d < 1) throw std::invalid_argument("shift direction: d must be >= 1");
  if (direction == ShiftDirection::kDiagonal) {
    return Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  }
  Vector e1 = Vector::Zero(d);
  e1[0] = 1.0;
  return e1;
}

void TheorySimConfig::validate() const {
  if (d < 1) throw ConfigError("theory: d must be >= 1");
  if (!(sigma > 0.0) || !(tau > 0.0)) throw ConfigError("theory: sigma and tau must be > 0");
  if (sigma == tau) throw ConfigError("theory: sigma must differ from tau");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw ConfigError("theory: epsilon must lie in (0, 1/2]");
  if (!(p > 0.5 && p < 1.0)) throw ConfigError("theory: p must lie in (1/2, 1)");
  if (trials < 1) throw ConfigError("theory: trials must be >= 1");
  if (chunk < 1) throw ConfigError("theory: chunk must be >= 1");
  if (workers < 1) throw ConfigError("theory: workers must be >= 1");
}

double TheorySimConfig::eta_kurt() const { return std::sqrt(kurtosis_e4() - 1.0); }

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// Fills `out` with i.i.d. draws from the family.
class CoordinateSampler {
 public:
  CoordinateSampler(NoiseFamily family, RngStream& rng) : family_(family), rng_(rng) {}

  void fill(std::vector<double>& out) {
    auto& eng = rng_.engine();
    switch (family_) {
      case NoiseFamily::kGaussian:
        for (double& v : out) v = normal_(eng);
        break;
      case NoiseFamily::kRademacher:
        for (double& v : out) v = (eng() >> 63) != 0 ? 1.0 : -1.0;
        break;
      case NoiseFamily::kUniformPm:
        for (double& v : out) {
          const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
          v = kSqrt3 * (2.0 * u - 1.0);
        }
        break;
    }
  }

 private:
  NoiseFamily family_;
  RngStream& rng_;
  boost::random::normal_distribution<double> normal_;
};

// Runs body(chunk_index, first_trial, count) over all chunks, spread across
// cfg.workers threads. Chunks are independent, so the assignment does not
// affect results.
template <typename Body>
void for_each_chunk(const TheorySimConfig& cfg, Body&& body) {
  const std::int64_t chunks = (cfg.trials + cfg.chunk - 1) / cfg.chunk;
  auto run = [&](std::int64_t first_chunk, std::int64_t stride) {
    for (std::int64_t c = first_chunk; c < chunks; c += stride) {
      const std::int64_t begin = c * cfg.chunk;
      body(c, begin, std::min(cfg.chunk, cfg.trials - begin));
    }
  };
  const int workers = static_cast<int>(std::min<std::int64_t>(cfg.workers, chunks));
  if (workers <= 1) {
    run(0, 1);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
}

Vector unit_direction(const Vector& direction, int d) {
  if (direction.size() == 0) return shift_direction_vector(ShiftDirection::kAxis, d);
  if (direction.size() != d) throw DimensionMismatch("theory direction", d, direction.size());
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("theory: direction must be nonzero");
  return direction / norm;
}

}  // namespace

double interval_halfwidth_k(const TheorySimConfig& cfg, RngStream& rng) {
  cfg.validate();
  const std::uint64_t master = rng.next_u64();
  const double s2 = cfg.sigma * cfg.sigma;
  std::vector<double> deviations(static_cast<std::size_t>(cfg.trials));
  for_each_chunk(cfg, [&](std::int64_t c, std::int64_t begin, std::int64_t count) {
    RngStream stream(master, "theory/k", static_cast<std::uint64_t>(c));
    CoordinateSampler sampler(cfg.family, stream);
    std::vector<double> delta(static_cast<std::size_t>(cfg.d));
    for (std::int64_t t = 0; t < count; ++t) {
      sampler.fill(delta);
      double sq = 0.0;
      for (double v : delta) sq += v * v;
      deviations[static_cast<std::size_t>(begin + t)] = std::abs(s2 * sq / cfg.d - s2);
    }
  });
  // Smallest v with empirical CDF(v) >= p.
  const auto rank = static_cast<std::size_t>(
      std::ceil(cfg.p * static_cast<double>(cfg.trials))) - 1;
  std::nth_element(deviations.begin(), deviations.begin() + static_cast<std::ptrdiff_t>(rank),
                   deviations.end());
  return deviations[rank];
}

double chebyshev_k_bound(const TheorySimConfig& cfg) {
  return cfg.sigma * cfg.sigma * cfg.eta_kurt() / std::sqrt(cfg.d * (1.0 - cfg.p));
}

ProbEstimate worst_case_prob(const TheorySimConfig& cfg, double k, const Vector& direction,
                             RngStream& rng) {
  cfg.validate();
  if (!(k >= 0.0)) throw std::invalid_argument("worst_case_prob: k must be >= 0");
  const Vector u = unit_direction(direction, cfg.d);
  const std::uint64_t master = rng.next_u64();
  const double s2 = cfg.sigma * cfg.sigma;
  const double lo = s2 - k;
  const double hi = s2 + k;
  const double t2 = cfg.tau * cfg.tau;
  const double cross = 2.0 * cfg.tau * cfg.epsilon;
  const double eps2 = cfg.epsilon * cfg.epsilon;
  const std::int64_t chunks = (cfg.trials + cfg.chunk - 1) / cfg.chunk;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
  for_each_chunk(cfg, [&](std::int64_t c, std::int64_t, std::int64_t count) {
    RngStream stream(master, "theory/event", static_cast<std::uint64_t>(c));
    CoordinateSampler sampler(cfg.family, stream);
    std::vector<double> delta(static_cast<std::size_t>(cfg.d));
    std::int64_t local = 0;
    for (std::int64_t t = 0; t < count; ++t) {
      sampler.fill(delta);
      double sq = 0.0;
      double dot = 0.0;
      for (int i = 0; i < cfg.d; ++i) {
        sq += delta[static_cast<std::size_t>(i)] * delta[static_cast<std::size_t>(i)];
        dot += delta[static_cast<std::size_t>(i)] * u[i];
      }
      // ‖tau delta + eps u‖^2 = tau^2 ‖delta‖^2 + 2 tau eps <delta, u> + eps^2
      const double stat = (t2 * sq + cross * dot + eps2) / cfg.d;
      if (stat >= lo && stat <= hi) ++local;
    }
    hits[static_cast<std::size_t>(c)] = local;
  });
  ProbEstimate out;
  out.trials = cfg.trials;
  for (auto h : hits) out.hits += h;
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(out.trials);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(out.trials));
  return out;
}

LemmaTerms lemma_terms(const TheorySimConfig& cfg) {
  cfg.validate();
  const double s2 = cfg.sigma * cfg.sigma;
  const double t2 = cfg.tau * cfg.tau;
  const double eta2 = cfg.kurtosis_e4() - 1.0;
  const double e2 = cfg.epsilon * cfg.epsilon;
  const double gap = t2 - s2;
  const double total = s2 + t2;
  return {4.0 * s2 * s2 * eta2 / (gap * gap * (1.0 - cfg.p)),
          6.0 * e2 / total,
          (36.0 * t2 * t2 * eta2 + 144.0 * t2 * e2) / (total * total)};
}

double lemma_constant_C(const TheorySimConfig& cfg) {
  const LemmaTerms t = lemma_terms(cfg);
  return std::max({t.variance_term, t.shift_term, t.tail_term});
}

double lemma_dimension_threshold(const TheorySimConfig& cfg) {
  const LemmaTerms t = lemma_terms(cfg);
  return std::max(t.variance_term, t.shift_term);
}

BelowDimensionThreshold::BelowDimensionThreshold(int d, double threshold)
    : std::invalid_argument("dimension " + std::to_string(d) +
                            " is below the lemma threshold " + std::to_string(threshold)),
      d_(d),
      threshold_(threshold) {}

DecayReport verify_decay(const TheorySimConfig& base, std::span<const int> dims,
                         std::uint64_t seed) {
  base.validate();
  if (dims.empty()) throw std::invalid_argument("verify_decay: no dimensions");
  if (!std::is_sorted(dims.begin(), dims.end()) ||
      std::adjacent_find(dims.begin(), dims.end()) != dims.end()) {
    throw std::invalid_argument("verify_decay: dims must be strictly increasing");
  }
  DecayReport report;
  report.C = lemma_constant_C(base);
  report.threshold = lemma_dimension_threshold(base);
  for (int d : dims) {
    if (static_cast<double>(d) < report.threshold) throw BelowDimensionThreshold(d, report.threshold);
  }
  report.pass = true;
  report.product_bounded = true;
  for (int d : dims) {
    TheorySimConfig cfg = base;
    cfg.d = d;
    DecayRow row;
    row.d = d;
    RngStream k_rng(seed, "theory/k-dim", static_cast<std::uint64_t>(d));
    row.k = interval_halfwidth_k(cfg, k_rng);
    row.k_chebyshev = chebyshev_k_bound(cfg);
    RngStream p_rng(seed, "theory/event-dim", static_cast<std::uint64_t>(d));
    row.prob = worst_case_prob(cfg, row.k, shift_direction_vector(cfg.direction, d), p_rng);
    row.bound = report.C / d;
    row.pass = row.prob.estimate <= row.bound + 3.0 * row.prob.std_error;
    report.pass = report.pass && row.pass;
    report.product_bounded = report.product_bounded && row.prob.estimate * d <= report.C;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace smoothmix
