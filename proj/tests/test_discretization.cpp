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
#include <random>

#include "ctql/discretization.hpp"
#include "ctql/dynamics.hpp"
#include "oracles.hpp"

namespace ctql {
namespace {

const Grids kGrids;

TEST(GridTest, Cardinalities) {
  EXPECT_EQ(kGrids.angle.size(), 39u);
  EXPECT_EQ(kGrids.velocity.size(), 37u);
  EXPECT_EQ(kGrids.action.size(), 25u);
  EXPECT_EQ(kGrids.angle.size() * kGrids.velocity.size() * kGrids.action.size(), 36075u);
}

TEST(GridTest, AngleLevels) {
  const auto& g = kGrids.angle;
  EXPECT_DOUBLE_EQ(g.front(), -kPi);
  EXPECT_DOUBLE_EQ(g.back(), kPi);
  // Eight equally spaced points over [-pi, -pi/9].
  EXPECT_NEAR(g.level_of(1), -kPi + (kPi - kPi / 9.0) / 7.0, 1e-15);
  EXPECT_NEAR(g.level_of(1), -2.74266, 1e-5);
  EXPECT_NEAR(g.level_of(7), -kPi / 9.0, 1e-15);
  EXPECT_NEAR(g.level_of(14), -kPi / 36.0, 1e-15);
  EXPECT_EQ(g.level_of(19), 0.0);
}

TEST(GridTest, VelocityLevels) {
  const auto& g = kGrids.velocity;
  EXPECT_EQ(g.front(), -8.0);
  EXPECT_EQ(g.back(), 8.0);
  EXPECT_EQ(g.level_of(9), -1.0);
  EXPECT_NEAR(g.level_of(10), -1.0 + 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(g.level_of(10), -0.8889, 1e-4);
}

TEST(GridTest, ActionLevels) {
  const auto& g = kGrids.action;
  EXPECT_EQ(g.level_of(0), -2.0);
  EXPECT_EQ(g.level_of(24), 2.0);
  EXPECT_NEAR(g.level_of(8), -0.2, 1e-15);
  EXPECT_NEAR(g.level_of(9), -0.15, 1e-15);
  EXPECT_EQ(g.level_of(12), 0.0);
}

TEST(GridTest, SymmetricAndIncreasing) {
  for (const Grid* g : {&kGrids.angle, &kGrids.velocity, &kGrids.action}) {
    const auto levels = g->levels();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      EXPECT_EQ(levels[i], -levels[levels.size() - 1 - i]);
      if (i > 0) {
        EXPECT_GT(levels[i], levels[i - 1]);
      }
    }
  }
}

TEST(GridTest, RejectsBadLevels) {
  EXPECT_THROW(Grid({}), std::invalid_argument);
  EXPECT_THROW(Grid({0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(Grid({1.0, 0.0}), std::invalid_argument);
}

TEST(QuantizeTest, Examples) {
  EXPECT_EQ(kGrids.angle.level_of(kGrids.angle.quantize(0.0)), 0.0);
  EXPECT_EQ(kGrids.angle.quantize(-3.0), 0u);
  EXPECT_EQ(kGrids.velocity.quantize(9.5), kGrids.velocity.size() - 1);
  EXPECT_EQ(kGrids.velocity.quantize(-100.0), 0u);
}

TEST(QuantizeTest, TieGoesToLowerIndex) {
  const Grid g({0.0, 1.0, 2.0});
  EXPECT_EQ(g.quantize(0.5), 0u);
  EXPECT_EQ(g.quantize(1.5), 1u);
}

TEST(QuantizeTest, RejectsNonFinite) {
  EXPECT_THROW(kGrids.angle.quantize(std::nan("")), std::invalid_argument);
  EXPECT_THROW(kGrids.angle.quantize(INFINITY), std::invalid_argument);
}

TEST(LevelOfTest, OutOfBounds) {
  EXPECT_THROW(kGrids.action.level_of(25), std::out_of_range);
}

TEST(QuantizeTest, IdempotentOnLevels) {
  for (const Grid* g : {&kGrids.angle, &kGrids.velocity, &kGrids.action}) {
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(g->quantize(g->level_of(i)), i);
  }
}

TEST(QuantizeTest, MatchesLinearScanAndIsSymmetric) {
  std::mt19937_64 rng(3);
  for (const Grid* g : {&kGrids.angle, &kGrids.velocity, &kGrids.action}) {
    std::uniform_real_distribution<double> dist(g->front() * 1.2, g->back() * 1.2);
    for (int i = 0; i < 20000; ++i) {
      const double x = dist(rng);
      const std::size_t idx = g->quantize(x);
      ASSERT_EQ(idx, oracle::nearest_level(g->levels(), x));
      const std::size_t mirrored = g->quantize(-x);
      ASSERT_EQ(g->level_of(mirrored), -g->level_of(idx));
    }
  }
}

TEST(GridTest, ChecksumDetectsChanges) {
  std::vector<double> levels(kGrids.action.levels().begin(), kGrids.action.levels().end());
  levels[3] += 1e-12;
  EXPECT_NE(Grid(levels).checksum(), kGrids.action.checksum());
  EXPECT_EQ(build_action_grid().checksum(), kGrids.action.checksum());
}

}  // namespace
}  // namespace ctql
