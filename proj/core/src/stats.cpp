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

#include "smoothmix/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace smoothmix {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's coefficients.
constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                         -2.759285104469687e+02, 1.383577518672690e+02,
                         -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                         -1.556989798598866e+02, 6.680131188771972e+01,
                         -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                         -2.400758277161838e+00, -2.549732539343734e+00,
                         4.374664141464968e+00, 2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01,
                         2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kLowBreak = 0.02425;

double acklam(double p) {
  if (p < kLowBreak) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  if (p > 1.0 - kLowBreak) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
         (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in (0,1), got " +
                            std::to_string(p));
  }
  double x = acklam(p);
  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  for (int iter = 0; iter < 2; ++iter) {
    // Work on the smaller tail so the residual keeps its relative precision.
    const double e = (x <= 0.0) ? std_normal_cdf(x) - p
                                : (1.0 - p) - std_normal_cdf(-x);
    const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double binomial_upper_tail(std::int64_t successes, std::int64_t trials, double p) {
  if (trials < 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("binomial_upper_tail: need 0 <= k <= n");
  }
  if (successes == 0) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double n = static_cast<double>(trials);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(n + 1.0);
  auto log_term = [&](std::int64_t j) {
    const double jd = static_cast<double>(j);
    return log_n_fact - std::lgamma(jd + 1.0) - std::lgamma(n - jd + 1.0) + jd * log_p +
           (n - jd) * log_q;
  };
  // Terms are unimodal in j with the mode near n*p; anchor the running sum at
  // the largest term in range to keep exp() well scaled.
  const auto mode = static_cast<std::int64_t>(std::floor((n + 1.0) * p));
  const std::int64_t anchor = std::max(successes, std::min(mode, trials));
  const double log_anchor = log_term(anchor);
  double sum = 0.0;
  for (std::int64_t j = anchor; j <= trials; ++j) {
    const double t = std::exp(log_term(j) - log_anchor);
    sum += t;
    if (t < 1e-18 * sum) break;
  }
  for (std::int64_t j = anchor - 1; j >= successes; --j) {
    const double t = std::exp(log_term(j) - log_anchor);
    sum += t;
    if (t < 1e-18 * sum && j < mode) break;
  }
  return std::min(1.0, std::exp(log_anchor + std::log(sum)));
}

double clopper_pearson_lower(std::int64_t successes, std::int64_t trials, double alpha) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("clopper_pearson_lower: need 0 <= k <= n and n >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("clopper_pearson_lower: alpha must lie in (0,1)");
  }
  if (successes == 0) return 0.0;
  if (successes == trials) return std::pow(alpha, 1.0 / static_cast<double>(trials));
  // The tail is increasing in p; keep tail(lo) <= alpha < tail(hi).
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (binomial_upper_tail(successes, trials, mid) <= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace smoothmix
