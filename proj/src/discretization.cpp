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

#include "ctql/discretization.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ctql/dynamics.hpp"

namespace ctql {

Grid::Grid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("Grid: no levels");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!std::isfinite(levels_[i])) {
      throw std::invalid_argument("Grid: non-finite level");
    }
    if (i > 0 && !(levels_[i] > levels_[i - 1])) {
      throw std::invalid_argument("Grid: levels must be strictly increasing");
    }
  }
}

std::size_t Grid::quantize(double value) const {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("Grid::quantize: non-finite value");
  }
  const auto upper = std::lower_bound(levels_.begin(), levels_.end(), value);
  if (upper == levels_.begin()) return 0;
  if (upper == levels_.end()) return levels_.size() - 1;
  const auto index = static_cast<std::size_t>(upper - levels_.begin());
  const double below = value - levels_[index - 1];
  const double above = levels_[index] - value;
  return below <= above ? index - 1 : index;
}

double Grid::level_of(std::size_t index) const {
  if (index >= levels_.size()) {
    throw std::out_of_range("Grid::level_of: index " + std::to_string(index) +
                            " out of " + std::to_string(levels_.size()));
  }
  return levels_[index];
}

std::uint64_t Grid::checksum() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (double level : levels_) {
    auto bits = std::bit_cast<std::uint64_t>(level);
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (bits >> (8 * byte)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

Grid build_symmetric_grid(std::span<const Segment> negative_half) {
  std::vector<double> half;
  bool first = true;
  for (const Segment& seg : negative_half) {
    if (seg.count < 1) throw std::invalid_argument("Segment: count must be >= 1");
    if (first) {
      // [outer, inner] with both endpoints.
      if (seg.count == 1) {
        half.push_back(seg.inner);
      } else {
        const double spacing = (seg.inner - seg.outer) / (seg.count - 1);
        for (int i = 0; i < seg.count - 1; ++i) half.push_back(seg.outer + i * spacing);
        half.push_back(seg.inner);
      }
      first = false;
    } else {
      // (outer, inner]
      const double spacing = (seg.inner - seg.outer) / seg.count;
      for (int i = 1; i < seg.count; ++i) half.push_back(seg.outer + i * spacing);
      half.push_back(seg.inner);
    }
  }
  if (half.empty() || half.back() != 0.0) {
    throw std::invalid_argument("build_symmetric_grid: half grid must end at 0");
  }

  std::vector<double> levels(half);
  for (auto it = half.rbegin() + 1; it != half.rend(); ++it) levels.push_back(-*it);
  return Grid(std::move(levels));
}

Grid build_angle_grid() {
  const std::array<Segment, 3> segments{{
      {-kPi, -kPi / 9.0, 8},
      {-kPi / 9.0, -kPi / 36.0, 7},
      {-kPi / 36.0, 0.0, 5},
  }};
  return build_symmetric_grid(segments);
}

Grid build_velocity_grid() {
  const std::array<Segment, 2> segments{{{-8.0, -1.0, 10}, {-1.0, 0.0, 9}}};
  return build_symmetric_grid(segments);
}

Grid build_action_grid() {
  const std::array<Segment, 2> segments{{{-2.0, -0.2, 9}, {-0.2, 0.0, 4}}};
  return build_symmetric_grid(segments);
}

}  // namespace ctql
