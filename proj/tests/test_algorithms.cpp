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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ctql/algorithms.hpp"

namespace ctql {
namespace {

const Grids kGrids;
const PendulumParams kNominal;
const GoalSpec kGoal;

AlgorithmConfig make(AlgorithmKind kind, std::optional<double> beta = std::nullopt,
                     RewardKind reward = RewardKind::kDistance) {
  AlgorithmConfig c;
  c.kind = kind;
  c.beta = beta;
  c.reward = reward;
  return c;
}

void expect_binomial(std::size_t count, std::size_t n, double p) {
  const double sigma = std::sqrt(n * p * (1.0 - p));
  EXPECT_LE(std::abs(static_cast<double>(count) - n * p), 3.0 * sigma + 1e-9)
      << count << " of " << n << " for p=" << p;
}

TEST(PrizeTest, StrictRadius) {
  const RewardParams rp;
  EXPECT_EQ(prize({0.0, 0.0}, rp), 5.0);
  EXPECT_EQ(prize({0.03, 0.03}, rp), 5.0);
  EXPECT_EQ(prize({0.05, 0.0}, rp), 0.0);
  EXPECT_EQ(prize({0.0, -0.05}, rp), 0.0);
  EXPECT_EQ(prize({1.0, 0.0}, rp), 0.0);
}

TEST(RewardTest, DistanceReward) {
  const RewardParams rp;
  EXPECT_EQ(reward_distance({kPi, 0.0}, {kPi, 0.0}, {0.0}, rp), 0.0);
  EXPECT_NEAR(reward_distance({kPi, 0.0}, {0.0, 0.0}, {0.0}, rp), kPi * kPi + 5.0, 1e-12);
  EXPECT_NEAR(reward_distance({kPi, 0.0}, {0.0, 0.0}, {0.0}, rp), 14.8696, 1e-4);
  EXPECT_NEAR(reward_distance({0.0, 0.0}, {0.5, 1.0}, {0.0}, rp), -0.35, 1e-12);
}

TEST(RewardTest, GymReward) {
  EXPECT_EQ(reward_gym({1.0, 1.0}, {0.0, 0.0}, {0.0}), 0.0);
  EXPECT_NEAR(reward_gym({0.0, 0.0}, {1.0, 1.0}, {1.0}), -1.101, 1e-12);
  EXPECT_NEAR(reward_gym({0.0, 0.0}, {kPi, 0.0}, {0.0}), -kPi * kPi, 1e-12);
  EXPECT_LE(reward_gym({0.0, 0.0}, {0.3, -2.0}, {1.5}), 0.0);
}

TEST(AlgorithmConfigTest, Validation) {
  EXPECT_NO_THROW(make(AlgorithmKind::kQL).validate());
  EXPECT_THROW(make(AlgorithmKind::kQL, 0.5).validate(), std::invalid_argument);
  EXPECT_THROW(make(AlgorithmKind::kPCTQL).validate(), std::invalid_argument);
  EXPECT_THROW(make(AlgorithmKind::kPCTQL, 1.2).validate(), std::invalid_argument);
  EXPECT_THROW(make(AlgorithmKind::kCTQL, std::nullopt, RewardKind::kGym).validate(),
               std::invalid_argument);
  auto unsafe = make(AlgorithmKind::kCTQL, std::nullopt, RewardKind::kGym);
  unsafe.allow_unsafe = true;
  EXPECT_NO_THROW(unsafe.validate());
}

TEST(AlgorithmConfigTest, LabelsAndOmega) {
  EXPECT_EQ(make(AlgorithmKind::kQL).label(), "ql");
  EXPECT_EQ(make(AlgorithmKind::kCTQL).label(), "ctql");
  EXPECT_EQ(make(AlgorithmKind::kPCTQL, 0.9897).label(), "pctql-0.9897");
  EXPECT_EQ(make(AlgorithmKind::kPCTQL, 0.123456789).label(), "pctql-0.123456789");
  // The listed betas give omega close to 0.001, 0.005, 0.010, 0.050, 0.100.
  const double betas[] = {0.9990, 0.9948, 0.9897, 0.9485, 0.8969};
  const double omegas[] = {0.001, 0.005, 0.010, 0.050, 0.100};
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(make(AlgorithmKind::kPCTQL, betas[i]).omega(), omegas[i], 5e-4);
  }
}

TEST(SelectActionTest, CtqlStartsWithTutor) {
  const auto config = make(AlgorithmKind::kCTQL);
  QTable q(kGrids);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const State s{kPi, 0.0};
    const auto choice = select_action(config, q, kGrids, s, kGrids.quantize(s.angle, 0.0), rng);
    EXPECT_NE(choice.source, ActionSource::kRlGreedy);
  }
  // A positive entry hands the state over to the learner.
  const QuantizedState qs = kGrids.quantize(kPi, 0.0);
  q.at(qs, 4) = 0.1;
  std::size_t learner = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = select_action(config, q, kGrids, {kPi, 0.0}, qs, rng);
    learner += c.source == ActionSource::kRlGreedy;
    EXPECT_NE(c.source, ActionSource::kTutor);
  }
  EXPECT_GT(learner, 900u);
}

TEST(SelectActionTest, QlNeverUsesTutor) {
  const auto config = make(AlgorithmKind::kQL);
  QTable q(kGrids);
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_NE(select_action(config, q, kGrids, {0.3, 0.1}, {0, 0}, rng).source,
              ActionSource::kTutor);
  }
}

TEST(SelectActionTest, PctqlWithBetaOneMatchesRlPolicy) {
  const auto config = make(AlgorithmKind::kPCTQL, 1.0);
  QTable q(kGrids);
  q.at({3, 3}, 11) = 2.0;
  Rng rng(3);
  const std::size_t n = 100000;
  std::size_t greedy = 0, tutor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = select_action(config, q, kGrids, {0.2, 0.0}, {3, 3}, rng);
    greedy += c.index == 11;
    tutor += c.source == ActionSource::kTutor;
  }
  EXPECT_EQ(tutor, 0u);
  expect_binomial(greedy, n, 0.97 + 0.03 / 25.0);
}

TEST(SelectActionTest, PctqlSourceFrequencies) {
  const auto config = make(AlgorithmKind::kPCTQL, 0.9485);
  QTable q(kGrids);
  Rng rng(4);
  const std::size_t n = 200000;
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[static_cast<int>(select_action(config, q, kGrids, {1.0, 1.0}, {5, 5}, rng).source)];
  }
  const double p_greedy = 0.9485 * 0.97;
  const double p_tutor = (1.0 - 0.9485) * 0.97;
  expect_binomial(counts[0], n, p_greedy);
  expect_binomial(counts[1], n, p_tutor);
  expect_binomial(counts[2], n, 1.0 - p_greedy - p_tutor);
}

TEST(RunEpisodeTest, CumulativeRewardIsSumOfSteps) {
  for (auto kind : {AlgorithmKind::kQL, AlgorithmKind::kCTQL}) {
    QTable q(kGrids);
    Rng rng(5);
    const auto r = run_episode(make(kind), q, kGrids, kNominal, {kPi, 0.0}, 1, kGoal, rng);
    ASSERT_EQ(r.trajectory.size(), 401u);
    ASSERT_EQ(r.steps.size(), 400u);
    double sum = 0.0;
    for (const auto& s : r.steps) sum += s.reward;
    EXPECT_EQ(sum, r.record.cumulative_reward);
    EXPECT_EQ(r.trajectory.front(), (State{kPi, 0.0}));
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      EXPECT_EQ(r.steps[k].next_state, r.trajectory[k + 1]);
    }
  }
}

TEST(RunEpisodeTest, DeterministicForEqualSeeds) {
  const auto config = make(AlgorithmKind::kPCTQL, 0.9897);
  QTable q1(kGrids), q2(kGrids);
  Rng r1(42), r2(42);
  for (int e = 1; e <= 5; ++e) {
    const auto a = run_episode(config, q1, kGrids, kNominal, {kPi, 0.0}, e, kGoal, r1);
    const auto b = run_episode(config, q2, kGrids, kNominal, {kPi, 0.0}, e, kGoal, r2);
    ASSERT_EQ(a.record, b.record);
    ASSERT_EQ(a.trajectory, b.trajectory);
  }
  EXPECT_EQ(q1, q2);
}

TEST(RunEpisodeTest, QlNeverReportsTutorUsage) {
  QTable q(kGrids);
  Rng rng(6);
  for (int e = 1; e <= 20; ++e) {
    EXPECT_EQ(run_episode(make(AlgorithmKind::kQL), q, kGrids, kNominal, {kPi, 0.0}, e, kGoal, rng)
                  .record.tutor_fraction,
              0.0);
  }
}

TEST(RunEpisodeTest, UpdatesEveryStepIncludingTutorSteps) {
  // With alpha = 1 and an all-zero table the first CTQL step comes from the
  // tutor, and its entry must equal the observed reward.
  GoalSpec short_goal = kGoal;
  short_goal.horizon = 1;
  short_goal.n_minus = 0;
  auto full = make(AlgorithmKind::kCTQL);
  full.hyperparams.lr_schedule.decay_scale = 1e300;  // alpha = 1
  full.hyperparams.eps_tutor = 0.0;
  QTable q2(kGrids);
  Rng rng2(8);
  const auto r2 = run_episode(full, q2, kGrids, kNominal, {0.5, 0.0}, 1, short_goal, rng2);
  const QuantizedState s0 = kGrids.quantize(0.5, 0.0);
  EXPECT_EQ(r2.steps[0].action_source, ActionSource::kTutor);
  EXPECT_DOUBLE_EQ(q2.at(s0, r2.steps[0].action_index), r2.steps[0].reward);
}

TEST(RunEpisodeTest, FrozenEvaluationLeavesTableUntouched) {
  QTable q(kGrids);
  std::mt19937_64 gen(1);
  for (double& v : q.values()) v = std::uniform_real_distribution<double>(-1, 1)(gen);
  const QTable before = q;
  Rng rng(9);
  run_episode(make(AlgorithmKind::kCTQL), q, kGrids, kNominal, {kPi, 0.0}, 3, kGoal, rng,
              {.learn = false});
  EXPECT_EQ(q, before);
  const auto r = evaluate_episode(make(AlgorithmKind::kQL), q, kGrids, kNominal, {kPi, 0.0}, kGoal, rng);
  for (const auto& s : r.steps) EXPECT_EQ(s.action_source, ActionSource::kRlGreedy);
}

TEST(RunEpisodeTest, TelescopingDistanceReward) {
  const RewardParams rp;
  auto config = make(AlgorithmKind::kQL);
  config.hyperparams.eps_rl = 0.5;
  QTable q(kGrids);
  Rng rng(10);
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> angle(-kPi, kPi), vel(-8.0, 8.0);
  for (int e = 1; e <= 200; ++e) {
    const State x0{angle(gen), vel(gen)};
    const auto r = run_episode(config, q, kGrids, kNominal, x0, e, kGoal, rng);
    double prizes = 0.0;
    for (std::size_t k = 1; k < r.trajectory.size(); ++k) prizes += prize(r.trajectory[k], rp);
    const double expected = weighted_distance(r.trajectory.front(), rp) -
                            weighted_distance(r.trajectory.back(), rp) + prizes;
    ASSERT_NEAR(r.record.cumulative_reward, expected, 1e-9);
  }
}

TEST(TutorOnlyTest, StabilizesLocally) {
  const auto tutor_only = make(AlgorithmKind::kPCTQL, 0.0);
  const QTable q(kGrids);
  Rng rng(11);
  const auto down = evaluate_episode(tutor_only, q, kGrids, kNominal, {kPi, 0.0}, kGoal, rng);
  for (const auto& s : down.steps) ASSERT_EQ(s.action_source, ActionSource::kTutor);

  const auto near = evaluate_episode(tutor_only, q, kGrids, kNominal, {0.1, 0.0}, kGoal, rng);
  EXPECT_TRUE(near.record.goal_met);
  ASSERT_TRUE(near.record.settling_time.has_value());
  EXPECT_LE(*near.record.settling_time, 300);
}

TEST(TutorOnlyTest, CannotSwingUpWithSemiImplicitIntegrator) {
  const auto tutor_only = make(AlgorithmKind::kPCTQL, 0.0);
  const QTable q(kGrids);
  const PendulumParams gym(1.0, 1.0, 10.0, 0.05, Integrator::kSemiImplicit);
  Rng rng(12);
  const auto down = evaluate_episode(tutor_only, q, kGrids, gym, {kPi, 0.0}, kGoal, rng);
  EXPECT_FALSE(down.record.goal_met);
}

}  // namespace
}  // namespace ctql
