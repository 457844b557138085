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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctql/algorithms.hpp"
#include "ctql/discretization.hpp"
#include "ctql/experiment.hpp"
#include "ctql/policies.hpp"

namespace ctql {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

// Q-table snapshot: '#'-prefixed header lines (format tag, dimensions, grid
// checksums, algorithm, reward) followed by a CSV body
// angle_index,velocity_index,action_index,value with one row per entry.
struct QTableSnapshot {
  QTable table;
  std::string algorithm;
  RewardKind reward = RewardKind::kDistance;
};

void write_qtable(const std::filesystem::path& path, const QTable& q,
                  const Grids& grids, const std::string& algorithm,
                  RewardKind reward);

/// Throws FormatError on checksum mismatch, truncation or malformed rows.
QTableSnapshot read_qtable(const std::filesystem::path& path, const Grids& grids);

// One row of episodes.csv / evaluation.csv. Sessions are 0-based.
struct EpisodeRow {
  std::string algorithm;
  std::optional<double> beta;
  RewardKind reward = RewardKind::kDistance;
  int session = 0;
  EpisodeRecord record;
};

inline constexpr const char* kEpisodeCsvHeader =
    "algorithm,beta,reward_kind,session,episode,cumulative_reward,tutor_fraction,"
    "goal_met,settling_time,steady_state_error";

void write_episode_csv(const std::filesystem::path& path,
                       std::span<const SessionResult> sessions);
void write_evaluation_csv(const std::filesystem::path& path,
                          std::span<const SessionResult> sessions);
std::vector<EpisodeRow> read_episode_csv(const std::filesystem::path& path);

void write_robustness_csv(const std::filesystem::path& path,
                          std::span<const RobustnessOutcome> outcomes,
                          const AlgorithmConfig& config, bool append);

void write_curves_csv(const std::filesystem::path& path,
                      std::span<const LearningCurve> curves);

nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const RobustnessSummary& summary);
nlohmann::json grids_to_json(const Grids& grids);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Rebuilds session metrics from episode and evaluation rows; row order does
/// not matter.
std::vector<SessionMetrics> metrics_from_rows(std::span<const EpisodeRow> episodes,
                                              std::span<const EpisodeRow> evaluations,
                                              const AlgorithmConfig& base);

/// Learning curves grouped the same way as metrics_from_rows.
std::vector<LearningCurve> curves_from_rows(std::span<const EpisodeRow> episodes,
                                            const AlgorithmConfig& base);

}  // namespace ctql
