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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctql/algorithms.hpp"
#include "ctql/experiment.hpp"

namespace ctql {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a run needs. Omitted keys keep the benchmark defaults.
struct ExperimentConfig {
  int sessions = 10;
  int episodes = 10000;
  GoalSpec goal{};
  PendulumParams env{};
  State initial_state{kPi, 0.0};
  RewardKind reward = RewardKind::kDistance;
  // Entries are "ql", "ctql", "pctql" (one per beta) or "pctql:<beta>".
  // Empty selects ql, ctql (distance reward only) and pctql.
  std::vector<std::string> algorithms;
  std::vector<double> betas{std::begin(kDefaultBetas), std::end(kDefaultBetas)};
  AlgorithmConfig base{};  // hyperparameters, gain, reward parameters
  std::uint64_t seed = 1;
  double velocity_noise_std = 0.0;
  int parallelism = 0;
  bool unsafe = false;
  RobustnessPlan robustness{};

  /// Resolves the algorithm list and validates the result.
  BenchmarkPlan plan() const;
  std::vector<AlgorithmConfig> resolved_algorithms() const;

  nlohmann::json to_json() const;
};

/// Parses a flat YAML mapping (JSON is accepted too). Unknown keys and
/// out-of-range values raise ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds an algorithm from a label such as "ql" or "pctql-0.9897".
AlgorithmConfig algorithm_from_label(const std::string& label,
                                     const ExperimentConfig& config);

}  // namespace ctql
