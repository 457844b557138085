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

#include "ctql/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ctql {

QTable::QTable(std::size_t angle_levels, std::size_t velocity_levels,
               std::size_t action_levels)
    : angle_levels_(angle_levels),
      velocity_levels_(velocity_levels),
      action_levels_(action_levels),
      values_(angle_levels * velocity_levels * action_levels, 0.0) {
  if (values_.empty()) throw std::invalid_argument("QTable: empty dimension");
}

double QTable::max_value(const QuantizedState& s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

double LearningRateSchedule::operator()(int episode) const {
  if (episode < 1) {
    throw std::invalid_argument("learning_rate: episodes are counted from 1, got " +
                                std::to_string(episode));
  }
  return 1.0 / std::sqrt(1.0 + episode / decay_scale);
}

double learning_rate(int episode) { return LearningRateSchedule{}(episode); }

void Hyperparams::validate() const {
  auto open01 = [](double p) { return p > 0.0 && p < 1.0; };
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("discount must lie in (0, 1]");
  }
  if (!open01(eps_tutor)) throw std::invalid_argument("eps_tutor must lie in (0, 1)");
  if (!open01(eps_rl)) throw std::invalid_argument("eps_rl must lie in (0, 1)");
  if (!(lr_schedule.decay_scale > 0.0) || !std::isfinite(lr_schedule.decay_scale)) {
    throw std::invalid_argument("lr_decay_scale must be finite and positive");
  }
}

double tutor_continuous(const State& state, const TutorGain& gain) {
  return -(gain.k1 * state.angle + gain.k2 * state.angular_velocity);
}

ActionIndex tutor_action(const State& state, const TutorGain& gain,
                         const Grid& action_grid) {
  return action_grid.quantize(tutor_continuous(state, gain));
}

ActionIndex random_action(std::size_t action_levels, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, action_levels - 1)(rng);
}

ActionIndex tutor_policy(const State& state, const TutorGain& gain,
                         double eps_tutor, const Grid& action_grid, Rng& rng) {
  if (uniform01(rng) < eps_tutor) return random_action(action_grid.size(), rng);
  return tutor_action(state, gain, action_grid);
}

ActionIndex greedy_action(const QTable& q, const QuantizedState& s) {
  const auto r = q.row(s);
  // max_element returns the first maximizer.
  return static_cast<ActionIndex>(std::max_element(r.begin(), r.end()) - r.begin());
}

ActionIndex rl_policy(const QTable& q, const QuantizedState& s, double eps_rl,
                      Rng& rng) {
  if (uniform01(rng) < eps_rl) return random_action(q.action_levels(), rng);
  return greedy_action(q, s);
}

void q_update(QTable& q, const QuantizedState& s, ActionIndex a,
              const QuantizedState& s_next, double reward, double alpha,
              double gamma) {
  if (!std::isfinite(reward)) throw std::invalid_argument("q_update: non-finite reward");
  const double target = reward + gamma * q.max_value(s_next);
  double& entry = q.at(s, a);
  entry = (1.0 - alpha) * entry + alpha * target;
}

}  // namespace ctql
