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

#include "ctql/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace ctql {

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

namespace {

double sample_variance(std::span<const double> values, double m) {
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

}  // namespace

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  return std::sqrt(sample_variance(values, mean(values)));
}

WelchResult welch_t_test(std::span<const double> sample_a,
                         std::span<const double> sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2) {
    throw std::invalid_argument("welch_t_test: each sample needs at least two values");
  }
  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const double mean_a = mean(sample_a);
  const double mean_b = mean(sample_b);
  const double va = sample_variance(sample_a, mean_a) / na;
  const double vb = sample_variance(sample_b, mean_b) / nb;
  if (!(va + vb > 0.0)) {
    throw std::invalid_argument("welch_t_test: both samples have zero variance");
  }

  WelchResult result;
  result.t = (mean_a - mean_b) / std::sqrt(va + vb);
  result.dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(result.dof);
  result.p = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t))),
                        0.0, 1.0);
  return result;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i + 1 - first);
  }
  return out;
}

std::vector<double> latin_hypercube(std::size_t n, std::size_t dims, Rng& rng) {
  if (n == 0 || dims == 0) {
    throw std::invalid_argument("latin_hypercube: n and dims must be positive");
  }
  std::vector<double> points(n * dims);
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      double u = (static_cast<double>(strata[i]) + uniform01(rng)) / static_cast<double>(n);
      // Rounding can land exactly on the upper stratum edge.
      const double upper = static_cast<double>(strata[i] + 1) / static_cast<double>(n);
      if (u >= upper) u = std::nextafter(upper, 0.0);
      points[i * dims + d] = u;
    }
  }
  return points;
}

}  // namespace ctql
