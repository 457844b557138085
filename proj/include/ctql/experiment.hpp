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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctql/algorithms.hpp"
#include "ctql/discretization.hpp"
#include "ctql/metrics.hpp"
#include "ctql/policies.hpp"
#include "ctql/statistics.hpp"

namespace ctql {

inline constexpr double kDefaultBetas[] = {0.9990, 0.9948, 0.9897, 0.9485, 0.8969};

struct BenchmarkPlan {
  int sessions = 10;
  int episodes = 10000;
  GoalSpec goal{};  // carries the horizon N
  PendulumParams env{};
  State initial_state{kPi, 0.0};
  RewardKind reward = RewardKind::kDistance;
  std::vector<AlgorithmConfig> algorithms;
  std::uint64_t master_seed = 1;
  double velocity_noise_std = 0.0;
  // Maximum concurrent sessions; 0 uses every available thread.
  int parallelism = 0;

  int horizon() const { return goal.horizon; }
  void validate() const;
};

/// QL, CTQL (distance reward only, unless `allow_unsafe`) and one pCTQL per
/// beta, all sharing the given hyperparameters.
std::vector<AlgorithmConfig> default_algorithms(RewardKind reward,
                                                const AlgorithmConfig& base,
                                                std::span<const double> betas,
                                                bool allow_unsafe = false);

// Seeds are pure functions of their inputs so any subset of sessions or
// setups can be rerun on its own.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_label(std::string_view label);
std::uint64_t session_seed(std::uint64_t master, const AlgorithmConfig& config,
                           int session);

struct SessionResult {
  AlgorithmConfig config;
  int session = 0;  // 0-based
  SessionLog log;
  QTable table;
  EpisodeRecord evaluation;  // frozen run from the nominal initial state
};

/// E episodes on a fresh table, followed by one frozen evaluation episode.
SessionResult run_session(const AlgorithmConfig& config, const BenchmarkPlan& plan,
                          const Grids& grids, int session);

/// Frozen evaluation used for a session's nominal control metrics.
EpisodeRecord evaluate_nominal(const AlgorithmConfig& config, const QTable& table,
                               const BenchmarkPlan& plan, const Grids& grids,
                               int session);

/// Every (algorithm, session) pair, ordered by algorithm then session.
std::vector<SessionResult> run_sessions_serial(const BenchmarkPlan& plan,
                                               const Grids& grids);
/// Same result as the serial version, sessions spread over OpenMP threads.
std::vector<SessionResult> run_sessions_parallel(const BenchmarkPlan& plan,
                                                 const Grids& grids, int threads);

// Per-session figures behind the comparison report.
struct SessionMetrics {
  AlgorithmConfig config;
  int session = 0;
  std::optional<int> terminal_episode;
  double j_avg = 0.0;
  std::optional<double> j_avg_t;
  bool eval_goal_met = false;
  std::optional<int> settling_time;
  std::optional<double> steady_state_error;
  double tutor_fraction_early = 0.0;
  double tutor_fraction_late = 0.0;
};

inline constexpr int kTutorUsageWindow = 500;

SessionMetrics session_metrics(const SessionResult& result);
SessionMetrics session_metrics(const AlgorithmConfig& config, int session,
                               std::span<const EpisodeRecord> log,
                               const EpisodeRecord& evaluation);

struct MetricSummary {
  std::size_t count = 0;     // sessions with a value
  std::size_t excluded = 0;  // sessions where the metric is undefined
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;
  std::optional<WelchResult> vs_ql;
  bool significant = false;  // vs_ql p < 0.05
};

struct AlgorithmSummary {
  AlgorithmConfig config;
  MetricSummary terminal_episode;
  MetricSummary j_avg;
  MetricSummary j_avg_t;
  MetricSummary settling_time;
  MetricSummary steady_state_error;
  MetricSummary tutor_fraction_early;
  MetricSummary tutor_fraction_late;
};

inline constexpr double kSignificanceLevel = 0.05;

struct ComparisonReport {
  RewardKind reward = RewardKind::kDistance;
  std::vector<AlgorithmSummary> algorithms;  // canonical order, QL first

  const AlgorithmSummary* find(const std::string& label) const;
};

/// Canonical ordering: QL, CTQL, then pCTQL by decreasing beta.
bool canonical_less(const AlgorithmConfig& a, const AlgorithmConfig& b);

/// Aggregates per-session metrics; the result does not depend on input order.
ComparisonReport compare(std::span<const SessionMetrics> metrics);

struct BenchmarkResult {
  std::vector<SessionResult> sessions;
  ComparisonReport report;
};

BenchmarkResult run_benchmark(const BenchmarkPlan& plan, const Grids& grids);

struct LearningCurve {
  AlgorithmConfig config;
  std::vector<double> reward_mean;  // moving averages of the per-episode means
  std::vector<double> reward_std;
  std::vector<double> tutor_mean;
  std::vector<double> tutor_std;
};

inline constexpr int kCurveWindow = 100;

/// Curves for finished sessions, algorithms in canonical order.
std::vector<LearningCurve> learning_curves(std::span<const SessionResult> sessions,
                                           int window = kCurveWindow);

/// Per-episode mean and spread across sessions, then smoothed.
std::vector<LearningCurve> learning_curves(
    std::span<const AlgorithmConfig> configs,
    std::span<const std::vector<const SessionLog*>> logs_per_config,
    int window = kCurveWindow);

// Perturbed-conditions sweep over nominal-trained tables.
struct Range {
  double lo;
  double hi;

  double at(double unit) const { return lo + unit * (hi - lo); }
};

struct RobustnessPlan {
  std::size_t num_setups = 1000;
  Range mass_factor{0.95, 1.05};
  Range length_factor{0.95, 1.05};
  Range angle{-kPi, kPi};
  Range angular_velocity{-kMaxAngularVelocity, kMaxAngularVelocity};
  std::uint64_t seed = 1;

  void validate() const;
};

struct RobustnessSetup {
  std::size_t index = 0;
  State initial_state{};
  double mass_factor = 1.0;
  double length_factor = 1.0;
};

/// Latin hypercube over (angle, velocity, mass factor, length factor).
std::vector<RobustnessSetup> robustness_setups(const RobustnessPlan& plan);

struct RobustnessOutcome {
  RobustnessSetup setup;
  int table_session = 0;
  EpisodeRecord record;
};

/// Setup i runs frozen with the table of session i mod S.
std::vector<RobustnessOutcome> run_robustness_serial(
    const RobustnessPlan& plan, std::span<const RobustnessSetup> setups,
    const AlgorithmConfig& config, std::span<const QTable* const> tables,
    const BenchmarkPlan& bench, const Grids& grids);
std::vector<RobustnessOutcome> run_robustness_parallel(
    const RobustnessPlan& plan, std::span<const RobustnessSetup> setups,
    const AlgorithmConfig& config, std::span<const QTable* const> tables,
    const BenchmarkPlan& bench, const Grids& grids, int threads);

struct RobustnessSummary {
  AlgorithmConfig config;
  std::size_t setups = 0;
  MetricSummary settling_time;
  MetricSummary steady_state_error;
  double nominal_steady_state_error = 0.0;  // mean of the nominal evaluations
  bool centered = false;  // |mean - nominal| <= 2 stddev
};

RobustnessSummary summarize_robustness(const AlgorithmConfig& config,
                                       std::span<const RobustnessOutcome> outcomes,
                                       double nominal_steady_state_error);

}  // namespace ctql
