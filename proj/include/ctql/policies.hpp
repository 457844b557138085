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
#include <random>
#include <span>
#include <vector>

#include "ctql/discretization.hpp"
#include "ctql/dynamics.hpp"

namespace ctql {

using Rng = std::mt19937_64;

// Dense Q(angle, velocity, action) table, zero-initialized.
class QTable {
 public:
  QTable(std::size_t angle_levels, std::size_t velocity_levels,
         std::size_t action_levels);
  explicit QTable(const Grids& grids)
      : QTable(grids.angle.size(), grids.velocity.size(), grids.action.size()) {}

  std::size_t angle_levels() const { return angle_levels_; }
  std::size_t velocity_levels() const { return velocity_levels_; }
  std::size_t action_levels() const { return action_levels_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> row(const QuantizedState& s) const {
    return {values_.data() + offset(s), action_levels_};
  }
  std::span<double> row(const QuantizedState& s) {
    return {values_.data() + offset(s), action_levels_};
  }
  double& at(const QuantizedState& s, ActionIndex a) { return row(s)[a]; }
  double at(const QuantizedState& s, ActionIndex a) const { return row(s)[a]; }

  double max_value(const QuantizedState& s) const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t offset(const QuantizedState& s) const {
    return (s.angle_index * velocity_levels_ + s.velocity_index) * action_levels_;
  }

  std::size_t angle_levels_;
  std::size_t velocity_levels_;
  std::size_t action_levels_;
  std::vector<double> values_;
};

// Linear state feedback v(x) = -(k1 * angle + k2 * velocity).
struct TutorGain {
  double k1 = 5.83;
  double k2 = 1.83;
};

// alpha(e) = (1 + e / decay_scale)^(-1/2), e counted from 1.
struct LearningRateSchedule {
  double decay_scale = 1000.0;

  double operator()(int episode) const;
};

struct Hyperparams {
  double discount = 0.97;
  double eps_tutor = 0.03;
  double eps_rl = 0.03;
  LearningRateSchedule lr_schedule{};

  /// Throws std::invalid_argument when a field leaves its range.
  void validate() const;
};

double tutor_continuous(const State& state, const TutorGain& gain);

/// Action level closest to the tutor's continuous torque.
ActionIndex tutor_action(const State& state, const TutorGain& gain,
                         const Grid& action_grid);

ActionIndex tutor_policy(const State& state, const TutorGain& gain,
                         double eps_tutor, const Grid& action_grid, Rng& rng);

/// Lowest index among the maximizers.
ActionIndex greedy_action(const QTable& q, const QuantizedState& s);

ActionIndex rl_policy(const QTable& q, const QuantizedState& s, double eps_rl,
                      Rng& rng);

ActionIndex random_action(std::size_t action_levels, Rng& rng);

/// Q(s,a) <- (1-alpha) Q(s,a) + alpha (reward + gamma max_u Q(s_next,u)).
/// Throws std::invalid_argument for a non-finite reward.
void q_update(QTable& q, const QuantizedState& s, ActionIndex a,
              const QuantizedState& s_next, double reward, double alpha,
              double gamma);

/// Default schedule with decay scale 1000.
double learning_rate(int episode);

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace ctql
