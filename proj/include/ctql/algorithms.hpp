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
#include <string>
#include <vector>

#include "ctql/discretization.hpp"
#include "ctql/dynamics.hpp"
#include "ctql/metrics.hpp"
#include "ctql/policies.hpp"

namespace ctql {

struct RewardParams {
  double prize_value = 5.0;
  double prize_radius = 0.05;
  double angle_weight = 1.0;
  double velocity_weight = 0.1;
  double gym_torque_weight = 0.001;
  State goal_state{};

  void validate() const;
};

enum class AlgorithmKind { kQL, kCTQL, kPCTQL };
enum class RewardKind { kDistance, kGym };
enum class ActionSource { kRlGreedy, kTutor, kRandom };

const char* to_string(AlgorithmKind kind);
const char* to_string(RewardKind kind);
const char* to_string(ActionSource source);
AlgorithmKind parse_algorithm_kind(const std::string& text);
RewardKind parse_reward_kind(const std::string& text);

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::kQL;
  std::optional<double> beta;  // pCTQL only
  RewardKind reward = RewardKind::kDistance;
  Hyperparams hyperparams{};
  TutorGain gain{};
  RewardParams reward_params{};
  // Permits CTQL with the Gym reward, where its switching test is meaningless.
  bool allow_unsafe = false;

  /// Stable identifier, e.g. "ql", "ctql", "pctql-0.9897".
  std::string label() const;

  /// Net probability of applying the tutor action under pCTQL.
  double omega() const;

  void validate() const;
};

struct StepOutcome {
  ActionIndex action_index = 0;
  ActionSource action_source = ActionSource::kRlGreedy;
  double reward = 0.0;
  State next_state{};
};

struct ActionChoice {
  ActionIndex index = 0;
  ActionSource source = ActionSource::kRlGreedy;
};

double prize(const State& state, const RewardParams& params);

/// Weighted squared distance to the goal.
double weighted_distance(const State& state, const RewardParams& params);

double reward_distance(const State& prev, const State& curr, TorqueInput u,
                       const RewardParams& params);

/// Negated Gym quadratic cost of the reached state and the applied torque.
double reward_gym(const State& prev, const State& curr, TorqueInput u,
                  const RewardParams& params = {});

double reward(const AlgorithmConfig& config, const State& prev, const State& curr,
              TorqueInput u);

/// Switching policy: QL always asks the epsilon-greedy learner, CTQL asks it
/// only where the table already holds a positive value, pCTQL mixes greedy,
/// tutor and random actions with probabilities beta(1-eps_rl), omega and the
/// remainder.
ActionChoice select_action(const AlgorithmConfig& config, const QTable& q,
                           const Grids& grids, const State& state,
                           const QuantizedState& qs, Rng& rng);

struct EpisodeOptions {
  // false: frozen evaluation, no table updates and exploration disabled.
  bool learn = true;
  // Standard deviation of additive velocity noise; zero in the benchmark.
  double velocity_noise_std = 0.0;
};

struct EpisodeResult {
  EpisodeRecord record;
  std::vector<State> trajectory;  // horizon + 1 states
  std::vector<StepOutcome> steps;
};

/// Runs `goal.horizon` steps from x0. In learning mode every transition
/// updates the table with alpha(episode), whichever policy chose the action.
EpisodeResult run_episode(const AlgorithmConfig& config, QTable& q,
                          const Grids& grids, const PendulumParams& env,
                          const State& x0, int episode, const GoalSpec& goal,
                          Rng& rng, const EpisodeOptions& options = {});

/// Frozen evaluation of a learned table.
EpisodeResult evaluate_episode(const AlgorithmConfig& config, const QTable& q,
                               const Grids& grids, const PendulumParams& env,
                               const State& x0, const GoalSpec& goal, Rng& rng);

/// Copy of `config` with both exploration rates set to zero.
AlgorithmConfig frozen(const AlgorithmConfig& config);

}  // namespace ctql
