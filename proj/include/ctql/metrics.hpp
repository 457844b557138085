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

#include <optional>
#include <span>
#include <vector>

#include "ctql/dynamics.hpp"

namespace ctql {

struct GoalSpec {
  State goal_state{};
  double eta = 0.05 * max_state_norm();
  int n_minus = 300;
  int horizon = 400;

  /// ||[pi, 8]||.
  static double max_state_norm();

  /// Throws std::invalid_argument unless 0 < n_minus < horizon and eta > 0.
  void validate() const;
};

struct GoalOutcome {
  bool satisfied = false;
  std::optional<int> k_bar;
};

/// Euclidean distance between two states.
double state_distance(const State& a, const State& b);

/// Smallest k_bar in [0, n_minus] after which the trajectory stays within eta
/// of the goal. Requires horizon + 1 states.
GoalOutcome goal_condition(std::span<const State> trajectory, const GoalSpec& spec);

std::optional<int> settling_time(std::span<const State> trajectory,
                                 const GoalSpec& spec);

/// Mean goal distance over steps [k_g, horizon].
double steady_state_error(std::span<const State> trajectory, int k_g,
                          const GoalSpec& spec);

struct EpisodeRecord {
  int episode = 0;
  double cumulative_reward = 0.0;
  double tutor_fraction = 0.0;
  bool goal_met = false;
  std::optional<int> settling_time;
  std::optional<double> steady_state_error;

  bool operator==(const EpisodeRecord&) const = default;
};

// Episodes 1..E of one session, in order.
using SessionLog = std::vector<EpisodeRecord>;

inline constexpr int kTerminalWindow = 30;

double avg_cumulative_reward(std::span<const EpisodeRecord> log);

/// Smallest E_t with the goal met on every episode in [E_t - 30, E_t].
std::optional<int> terminal_episode(std::span<const EpisodeRecord> log);

/// Mean cumulative reward over episodes [e_t, E].
double avg_reward_after_terminal(std::span<const EpisodeRecord> log, int e_t);

}  // namespace ctql
