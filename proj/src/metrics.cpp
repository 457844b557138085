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

#include "ctql/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctql {

double GoalSpec::max_state_norm() { return std::hypot(kPi, kMaxAngularVelocity); }

void GoalSpec::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("GoalSpec: eta must be positive");
  if (!(n_minus > 0 && n_minus < horizon)) {
    throw std::invalid_argument("GoalSpec: need 0 < n_minus < horizon");
  }
}

double state_distance(const State& a, const State& b) {
  return std::hypot(a.angle - b.angle, a.angular_velocity - b.angular_velocity);
}

GoalOutcome goal_condition(std::span<const State> trajectory, const GoalSpec& spec) {
  if (trajectory.size() != static_cast<std::size_t>(spec.horizon) + 1) {
    throw std::invalid_argument("goal_condition: expected " +
                                std::to_string(spec.horizon + 1) + " states, got " +
                                std::to_string(trajectory.size()));
  }
  // Walk backwards to the start of the final in-tube run.
  int k = spec.horizon;
  while (k >= 0 && state_distance(trajectory[k], spec.goal_state) <= spec.eta) --k;
  const int k_bar = k + 1;
  if (k_bar > spec.n_minus) return {};
  return {true, k_bar};
}

std::optional<int> settling_time(std::span<const State> trajectory,
                                 const GoalSpec& spec) {
  return goal_condition(trajectory, spec).k_bar;
}

double steady_state_error(std::span<const State> trajectory, int k_g,
                          const GoalSpec& spec) {
  if (k_g < 0 || k_g > spec.horizon) {
    throw std::invalid_argument("steady_state_error: k_g outside [0, horizon]");
  }
  if (trajectory.size() != static_cast<std::size_t>(spec.horizon) + 1) {
    throw std::invalid_argument("steady_state_error: wrong trajectory length");
  }
  double sum = 0.0;
  for (int k = k_g; k <= spec.horizon; ++k) {
    sum += state_distance(trajectory[k], spec.goal_state);
  }
  return sum / (spec.horizon - k_g + 1);
}

double avg_cumulative_reward(std::span<const EpisodeRecord> log) {
  if (log.empty()) throw std::invalid_argument("avg_cumulative_reward: empty log");
  double sum = 0.0;
  for (const auto& r : log) sum += r.cumulative_reward;
  return sum / static_cast<double>(log.size());
}

std::optional<int> terminal_episode(std::span<const EpisodeRecord> log) {
  int streak = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    streak = log[i].goal_met ? streak + 1 : 0;
    if (streak >= kTerminalWindow + 1) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

double avg_reward_after_terminal(std::span<const EpisodeRecord> log, int e_t) {
  const int episodes = static_cast<int>(log.size());
  if (e_t < 1 || e_t > episodes) {
    throw std::invalid_argument("avg_reward_after_terminal: E_t outside [1, E]");
  }
  return avg_cumulative_reward(log.subspan(static_cast<std::size_t>(e_t - 1)));
}

}  // namespace ctql
