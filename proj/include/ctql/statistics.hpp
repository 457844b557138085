/*
 Copyright 2026 The ctql Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctql/policies.hpp"

namespace ctql {

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

/// Two-sided Welch t-test. Throws std::invalid_argument when either sample
/// has fewer than two values or both samples have zero variance.
WelchResult welch_t_test(std::span<const double> sample_a,
                         std::span<const double> sample_b);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1); zero for fewer than two values.
double sample_stddev(std::span<const double> values);

/// Right-aligned running mean; the first window - 1 entries average the
/// available prefix.
std::vector<double> moving_average(std::span<const double> series, int window);

/// n points in [0, 1)^dims, one per stratum [i/n, (i+1)/n) in every
/// dimension. Row-major: point i is [i * dims, (i + 1) * dims).
std::vector<double> latin_hypercube(std::size_t n, std::size_t dims, Rng& rng);

}  // namespace ctql
