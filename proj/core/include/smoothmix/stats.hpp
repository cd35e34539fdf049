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

namespace smoothmix {

// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)).
double std_normal_cdf(double x);

// Inverse of the standard normal CDF. Acklam's rational approximation
// (relative error ~1.15e-9) polished with two Halley steps against
// std_normal_cdf, giving |Phi(result) - p| < 1e-12. Throws std::domain_error
// unless 0 < p < 1.
double std_normal_quantile(double p);

// P(Binomial(trials, p) >= successes), summed exactly in log space.
double binomial_upper_tail(std::int64_t successes, std::int64_t trials, double p);

// One-sided Clopper-Pearson lower confidence limit at level 1 - alpha: the p
// solving P(Binomial(trials, p) >= successes) = alpha, found by bisection on
// the exact tail. Returns 0 for successes == 0 and alpha^(1/trials) for
// successes == trials. Throws std::invalid_argument on bad arguments.
double clopper_pearson_lower(std::int64_t successes, std::int64_t trials, double alpha);

}  // namespace smoothmix
