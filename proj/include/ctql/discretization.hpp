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
#include <cstdint>
#include <span>
#include <vector>

namespace ctql {

// Strictly increasing set of representative levels.
class Grid {
 public:
  explicit Grid(std::vector<double> levels);

  std::size_t size() const { return levels_.size(); }
  std::span<const double> levels() const { return levels_; }
  double front() const { return levels_.front(); }
  double back() const { return levels_.back(); }

  /// Index of the nearest level; exact midpoints go to the lower index and
  /// out-of-range values snap to the closest extreme.
  /// Throws std::invalid_argument for non-finite values.
  std::size_t quantize(double value) const;

  /// Throws std::out_of_range for an invalid index.
  double level_of(std::size_t index) const;

  /// FNV-1a over the bit patterns of the levels.
  std::uint64_t checksum() const;

  bool operator==(const Grid&) const = default;

 private:
  std::vector<double> levels_;
};

struct QuantizedState {
  std::size_t angle_index = 0;
  std::size_t velocity_index = 0;

  bool operator==(const QuantizedState&) const = default;
};

using ActionIndex = std::size_t;

// One segment of a piecewise-uniform half grid, ordered from the outer edge
// inwards. The first segment includes both endpoints, the others exclude
// their outer endpoint.
struct Segment {
  double outer;
  double inner;
  int count;
};

/// Builds the non-positive half from `segments` and mirrors it, sharing 0.
Grid build_symmetric_grid(std::span<const Segment> negative_half);

Grid build_angle_grid();
Grid build_velocity_grid();
Grid build_action_grid();

// The three benchmark grids, built once.
struct Grids {
  Grid angle = build_angle_grid();
  Grid velocity = build_velocity_grid();
  Grid action = build_action_grid();

  QuantizedState quantize(double angle_value, double velocity_value) const {
    return {angle.quantize(angle_value), velocity.quantize(velocity_value)};
  }
};

}  // namespace ctql
