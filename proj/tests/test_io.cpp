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

#include <filesystem>
#include <fstream>
#include <random>

#include "ctql/config.hpp"
#include "ctql/io.hpp"

namespace ctql {
namespace {

namespace fs = std::filesystem;

const Grids kGrids;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ctql_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(ConfigTest, DefaultsMatchBenchmark) {
  const ExperimentConfig c = parse_config("{}");
  EXPECT_EQ(c.sessions, 10);
  EXPECT_EQ(c.episodes, 10000);
  EXPECT_EQ(c.goal.horizon, 400);
  EXPECT_EQ(c.goal.n_minus, 300);
  EXPECT_DOUBLE_EQ(c.base.hyperparams.discount, 0.97);
  EXPECT_DOUBLE_EQ(c.base.hyperparams.eps_tutor, 0.03);
  EXPECT_DOUBLE_EQ(c.base.gain.k1, 5.83);
  const auto algs = c.resolved_algorithms();
  ASSERT_EQ(algs.size(), 7u);
  EXPECT_EQ(algs.back().label(), "pctql-0.8969");
}

TEST(ConfigTest, OverridesAndGymDefaults) {
  const ExperimentConfig c = parse_config("episodes: 100\nreward: gym\nseed: 7\n");
  EXPECT_EQ(c.episodes, 100);
  EXPECT_EQ(c.seed, 7u);
  const auto plan = c.plan();
  EXPECT_EQ(plan.episodes, 100);
  EXPECT_EQ(plan.algorithms.size(), 6u);
  for (const auto& a : plan.algorithms) EXPECT_NE(a.kind, AlgorithmKind::kCTQL);
}

TEST(ConfigTest, ExplicitAlgorithmList) {
  const ExperimentConfig c = parse_config("algorithms: [ql, 'pctql:0.9', pctql]\nbetas: [0.99, 0.98]\n");
  const auto algs = c.resolved_algorithms();
  ASSERT_EQ(algs.size(), 4u);
  EXPECT_EQ(algs[0].label(), "ql");
  EXPECT_EQ(algs[1].label(), "pctql-0.9000");
  EXPECT_EQ(algs[2].label(), "pctql-0.9900");
  EXPECT_EQ(algs[3].label(), "pctql-0.9800");
}

TEST(ConfigTest, RejectsInvalidValuesWithLocation) {
  try {
    parse_config("sessions: 3\nbetas: [0.9, 1.2]\n", "cfg.yaml");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.yaml:2"), std::string::npos) << e.what();
  }
  try {
    parse_config("sessions: 3\nepisodez: 5\n", "cfg.yaml");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.yaml:2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("episodez"), std::string::npos);
  }
  EXPECT_THROW(parse_config("eps_rl: 0\n"), ConfigError);
  EXPECT_THROW(parse_config("discount: 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("sessions: -1\n"), ConfigError);
  EXPECT_THROW(parse_config("reward: gym\nalgorithms: [ctql]\n").plan(), std::exception);
  EXPECT_NO_THROW(parse_config("reward: gym\nalgorithms: [ctql]\nunsafe: true\n").plan());
}

TEST(ConfigTest, JsonRoundTrip) {
  const ExperimentConfig c = parse_config("episodes: 321\nreward: gym\nbetas: [0.95]\n");
  const ExperimentConfig back = parse_config(c.to_json().dump());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(ConfigTest, AlgorithmFromLabel) {
  const ExperimentConfig c;
  EXPECT_EQ(algorithm_from_label("ql", c).kind, AlgorithmKind::kQL);
  const auto p = algorithm_from_label("pctql-0.9897", c);
  ASSERT_TRUE(p.beta.has_value());
  EXPECT_DOUBLE_EQ(*p.beta, 0.9897);
  EXPECT_THROW(algorithm_from_label("sarsa", c), std::exception);
}

TEST(FormatTest, DoublesRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.0x"), FormatError);
  EXPECT_THROW(parse_double(""), FormatError);
}

TEST_F(TempDir, QTableRoundTrip) {
  QTable q(kGrids);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.0, 10.0);
  for (double& v : q.values()) v = d(rng);
  write_qtable(dir_ / "q.csv", q, kGrids, "pctql-0.9897", RewardKind::kGym);
  const auto snap = read_qtable(dir_ / "q.csv", kGrids);
  EXPECT_EQ(snap.table, q);
  EXPECT_EQ(snap.algorithm, "pctql-0.9897");
  EXPECT_EQ(snap.reward, RewardKind::kGym);
}

TEST_F(TempDir, ZeroTableRoundTrip) {
  const QTable q(kGrids);
  write_qtable(dir_ / "q.csv", q, kGrids, "ql", RewardKind::kDistance);
  EXPECT_EQ(read_qtable(dir_ / "q.csv", kGrids).table, q);
}

TEST_F(TempDir, QTableRejectsMismatchAndTruncation) {
  const QTable q(kGrids);
  write_qtable(dir_ / "q.csv", q, kGrids, "ql", RewardKind::kDistance);
  std::string text = read_text(dir_ / "q.csv");

  Grids other;
  other.action = build_action_grid();
  auto levels = std::vector<double>(other.action.levels().begin(), other.action.levels().end());
  levels.back() += 0.01;
  other.action = Grid(levels);
  EXPECT_THROW(read_qtable(dir_ / "q.csv", other), FormatError);

  write_text(dir_ / "trunc.csv", text.substr(0, text.size() / 2));
  EXPECT_THROW(read_qtable(dir_ / "trunc.csv", kGrids), FormatError);

  const auto last_line = text.rfind('\n', text.size() - 2);
  write_text(dir_ / "dup.csv", text + text.substr(last_line + 1));
  EXPECT_THROW(read_qtable(dir_ / "dup.csv", kGrids), FormatError);

  write_text(dir_ / "bad.csv", "not a snapshot\n");
  EXPECT_THROW(read_qtable(dir_ / "bad.csv", kGrids), FormatError);
  EXPECT_THROW(read_qtable(dir_ / "missing.csv", kGrids), std::exception);
}

class SessionsIo : public TempDir {
 protected:
  void SetUp() override {
    TempDir::SetUp();
    plan_.sessions = 3;
    plan_.episodes = 25;
    plan_.master_seed = 17;
    AlgorithmConfig base;
    const double betas[] = {0.9485};
    plan_.algorithms = default_algorithms(RewardKind::kDistance, base, betas);
    sessions_ = run_sessions_serial(plan_, kGrids);
  }
  BenchmarkPlan plan_;
  std::vector<SessionResult> sessions_;
};

TEST_F(SessionsIo, EpisodeCsvRoundTrip) {
  write_episode_csv(dir_ / "episodes.csv", sessions_);
  const auto rows = read_episode_csv(dir_ / "episodes.csv");
  ASSERT_EQ(rows.size(), 3u * 3u * 25u);
  std::size_t i = 0;
  for (const auto& s : sessions_) {
    for (const auto& r : s.log) {
      EXPECT_EQ(rows[i].algorithm, s.config.label());
      EXPECT_EQ(rows[i].beta, s.config.beta);
      EXPECT_EQ(rows[i].session, s.session);
      EXPECT_EQ(rows[i].record, r);
      ++i;
    }
  }
  const std::string text = read_text(dir_ / "episodes.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), kEpisodeCsvHeader);
}

TEST_F(SessionsIo, MetricsFromRowsMatchInProcess) {
  write_episode_csv(dir_ / "episodes.csv", sessions_);
  write_evaluation_csv(dir_ / "evaluation.csv", sessions_);
  auto episodes = read_episode_csv(dir_ / "episodes.csv");
  const auto evaluations = read_episode_csv(dir_ / "evaluation.csv");
  std::mt19937_64 rng(8);
  std::shuffle(episodes.begin(), episodes.end(), rng);

  std::vector<SessionMetrics> direct;
  for (const auto& s : sessions_) direct.push_back(session_metrics(s));
  const auto expected = to_json(compare(direct));
  const auto rebuilt = to_json(compare(metrics_from_rows(episodes, evaluations, AlgorithmConfig{})));
  EXPECT_EQ(rebuilt, expected);

  const auto curves = curves_from_rows(episodes, AlgorithmConfig{});
  const auto direct_curves = learning_curves(sessions_);
  ASSERT_EQ(curves.size(), direct_curves.size());
  for (std::size_t k = 0; k < curves.size(); ++k) {
    EXPECT_EQ(curves[k].config.label(), direct_curves[k].config.label());
    EXPECT_EQ(curves[k].reward_mean, direct_curves[k].reward_mean);
    EXPECT_EQ(curves[k].tutor_mean, direct_curves[k].tutor_mean);
  }
}

TEST_F(SessionsIo, MetricsFromRowsRejectsGaps) {
  write_episode_csv(dir_ / "episodes.csv", sessions_);
  write_evaluation_csv(dir_ / "evaluation.csv", sessions_);
  auto episodes = read_episode_csv(dir_ / "episodes.csv");
  const auto evaluations = read_episode_csv(dir_ / "evaluation.csv");
  episodes.erase(episodes.begin() + 5);
  EXPECT_THROW(metrics_from_rows(episodes, evaluations, AlgorithmConfig{}), std::exception);
}

TEST_F(SessionsIo, SummaryJsonShape) {
  std::vector<SessionMetrics> direct;
  for (const auto& s : sessions_) direct.push_back(session_metrics(s));
  const auto j = to_json(compare(direct));
  EXPECT_EQ(j.at("reward"), "distance");
  ASSERT_EQ(j.at("algorithms").size(), 3u);
  EXPECT_EQ(j.at("algorithms")[0].at("algorithm"), "ql");
}

}  // namespace
}  // namespace ctql
