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

#include "ctql/algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace ctql {

void RewardParams::validate() const {
  if (!(prize_value > 0.0) || !(prize_radius > 0.0)) {
    throw std::invalid_argument("prize_value and prize_radius must be positive");
  }
  if (angle_weight < 0.0 || velocity_weight < 0.0 || gym_torque_weight < 0.0) {
    throw std::invalid_argument("reward weights must be non-negative");
  }
}

const char* to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kQL: return "ql";
    case AlgorithmKind::kCTQL: return "ctql";
    case AlgorithmKind::kPCTQL: return "pctql";
  }
  return "?";
}

const char* to_string(RewardKind kind) {
  return kind == RewardKind::kDistance ? "distance" : "gym";
}

const char* to_string(ActionSource source) {
  switch (source) {
    case ActionSource::kRlGreedy: return "rl-greedy";
    case ActionSource::kTutor: return "tutor";
    case ActionSource::kRandom: return "random";
  }
  return "?";
}

AlgorithmKind parse_algorithm_kind(const std::string& text) {
  if (text == "ql") return AlgorithmKind::kQL;
  if (text == "ctql") return AlgorithmKind::kCTQL;
  if (text == "pctql") return AlgorithmKind::kPCTQL;
  throw std::invalid_argument("unknown algorithm '" + text + "'");
}

RewardKind parse_reward_kind(const std::string& text) {
  if (text == "distance") return RewardKind::kDistance;
  if (text == "gym") return RewardKind::kGym;
  throw std::invalid_argument("unknown reward kind '" + text +
                              "' (expected distance or gym)");
}

std::string AlgorithmConfig::label() const {
  if (kind != AlgorithmKind::kPCTQL) return to_string(kind);
  const double b = beta.value_or(0.0);
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "pctql-%.4f", b);
  if (std::strtod(buffer + 6, nullptr) != b) {
    std::snprintf(buffer, sizeof buffer, "pctql-%.17g", b);
  }
  return buffer;
}

double AlgorithmConfig::omega() const {
  if (kind != AlgorithmKind::kPCTQL) return 0.0;
  return (1.0 - *beta) * (1.0 - hyperparams.eps_tutor);
}

void AlgorithmConfig::validate() const {
  hyperparams.validate();
  reward_params.validate();
  if (!std::isfinite(gain.k1) || !std::isfinite(gain.k2)) {
    throw std::invalid_argument("tutor gain must be finite");
  }
  if (kind == AlgorithmKind::kPCTQL) {
    if (!beta || !(*beta >= 0.0 && *beta <= 1.0)) {
      throw std::invalid_argument("pCTQL needs beta in [0, 1]");
    }
  } else if (beta) {
    throw std::invalid_argument("beta is only meaningful for pCTQL");
  }
  if (kind == AlgorithmKind::kCTQL && reward == RewardKind::kGym && !allow_unsafe) {
    throw std::invalid_argument(
        "CTQL requires the distance reward; its positive-value switching test "
        "never fires under the Gym reward (pass --unsafe to override)");
  }
}

double prize(const State& state, const RewardParams& params) {
  return state_distance(state, params.goal_state) < params.prize_radius
             ? params.prize_value
             : 0.0;
}

double weighted_distance(const State& state, const RewardParams& params) {
  const double da = state.angle - params.goal_state.angle;
  const double dv = state.angular_velocity - params.goal_state.angular_velocity;
  return params.angle_weight * da * da + params.velocity_weight * dv * dv;
}

double reward_distance(const State& prev, const State& curr, TorqueInput /*u*/,
                       const RewardParams& params) {
  return weighted_distance(prev, params) - weighted_distance(curr, params) +
         prize(curr, params);
}

double reward_gym(const State& /*prev*/, const State& curr, TorqueInput u,
                  const RewardParams& params) {
  return -(weighted_distance(curr, params) +
           params.gym_torque_weight * u.torque * u.torque);
}

double reward(const AlgorithmConfig& config, const State& prev, const State& curr,
              TorqueInput u) {
  return config.reward == RewardKind::kDistance
             ? reward_distance(prev, curr, u, config.reward_params)
             : reward_gym(prev, curr, u, config.reward_params);
}

ActionChoice select_action(const AlgorithmConfig& config, const QTable& q,
                           const Grids& grids, const State& state,
                           const QuantizedState& qs, Rng& rng) {
  const Hyperparams& hp = config.hyperparams;
  auto rl = [&]() -> ActionChoice {
    if (uniform01(rng) < hp.eps_rl) {
      return {random_action(grids.action.size(), rng), ActionSource::kRandom};
    }
    return {greedy_action(q, qs), ActionSource::kRlGreedy};
  };
  auto tutor = [&]() -> ActionChoice {
    if (uniform01(rng) < hp.eps_tutor) {
      return {random_action(grids.action.size(), rng), ActionSource::kRandom};
    }
    return {tutor_action(state, config.gain, grids.action), ActionSource::kTutor};
  };

  switch (config.kind) {
    case AlgorithmKind::kQL:
      return rl();
    case AlgorithmKind::kCTQL:
      return q.max_value(qs) > 0.0 ? rl() : tutor();
    case AlgorithmKind::kPCTQL: {
      const double beta = *config.beta;
      const double p_greedy = beta * (1.0 - hp.eps_rl);
      const double p_tutor = (1.0 - beta) * (1.0 - hp.eps_tutor);
      const double u = uniform01(rng);
      if (u < p_greedy) return {greedy_action(q, qs), ActionSource::kRlGreedy};
      if (u < p_greedy + p_tutor) {
        return {tutor_action(state, config.gain, grids.action), ActionSource::kTutor};
      }
      return {random_action(grids.action.size(), rng), ActionSource::kRandom};
    }
  }
  throw std::logic_error("select_action: unknown algorithm kind");
}

AlgorithmConfig frozen(const AlgorithmConfig& config) {
  AlgorithmConfig out = config;
  out.hyperparams.eps_rl = 0.0;
  out.hyperparams.eps_tutor = 0.0;
  return out;
}

namespace {

EpisodeResult simulate(const AlgorithmConfig& config, const QTable& q,
                       QTable* learner, const Grids& grids, const PendulumParams& env,
                       const State& x0, int episode, const GoalSpec& goal, Rng& rng,
                       const EpisodeOptions& options) {
  const int horizon = goal.horizon;
  const double alpha = learner ? config.hyperparams.lr_schedule(episode) : 0.0;
  const double gamma = config.hyperparams.discount;
  std::normal_distribution<double> noise(0.0, options.velocity_noise_std);

  EpisodeResult result;
  result.trajectory.reserve(static_cast<std::size_t>(horizon) + 1);
  result.steps.reserve(static_cast<std::size_t>(horizon));
  result.trajectory.push_back(x0);

  State state = x0;
  QuantizedState qs = grids.quantize(state.angle, state.angular_velocity);
  double cumulative = 0.0;
  int tutor_steps = 0;

  for (int k = 0; k < horizon; ++k) {
    const ActionChoice choice = select_action(config, q, grids, state, qs, rng);
    const TorqueInput u{grids.action.level_of(choice.index)};
    State disturbance{};
    if (options.velocity_noise_std > 0.0) disturbance.angular_velocity = noise(rng);
    const State next = step(state, u, env, disturbance);
    const double r = reward(config, state, next, u);
    const QuantizedState qs_next = grids.quantize(next.angle, next.angular_velocity);

    if (learner) q_update(*learner, qs, choice.index, qs_next, r, alpha, gamma);

    cumulative += r;
    if (choice.source == ActionSource::kTutor) ++tutor_steps;
    result.steps.push_back({choice.index, choice.source, r, next});
    result.trajectory.push_back(next);
    state = next;
    qs = qs_next;
  }

  EpisodeRecord& rec = result.record;
  rec.episode = episode;
  rec.cumulative_reward = cumulative;
  rec.tutor_fraction = horizon > 0 ? static_cast<double>(tutor_steps) / horizon : 0.0;
  const GoalOutcome outcome = goal_condition(result.trajectory, goal);
  rec.goal_met = outcome.satisfied;
  if (outcome.k_bar) {
    rec.settling_time = outcome.k_bar;
    rec.steady_state_error = steady_state_error(result.trajectory, *outcome.k_bar, goal);
  }
  return result;
}

}  // namespace

EpisodeResult run_episode(const AlgorithmConfig& config, QTable& q,
                          const Grids& grids, const PendulumParams& env,
                          const State& x0, int episode, const GoalSpec& goal,
                          Rng& rng, const EpisodeOptions& options) {
  if (!options.learn) {
    return simulate(frozen(config), q, nullptr, grids, env, x0, episode, goal, rng,
                    options);
  }
  return simulate(config, q, &q, grids, env, x0, episode, goal, rng, options);
}

EpisodeResult evaluate_episode(const AlgorithmConfig& config, const QTable& q,
                               const Grids& grids, const PendulumParams& env,
                               const State& x0, const GoalSpec& goal, Rng& rng) {
  return simulate(frozen(config), q, nullptr, grids, env, x0, 1, goal, rng,
                  {.learn = false});
}

}  // namespace ctql
