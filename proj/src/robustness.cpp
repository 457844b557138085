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

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>

#include "ctql/experiment.hpp"

namespace ctql {

namespace {

constexpr std::uint64_t kSamplingTag = 0x6c68735f73616d70ULL;

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw std::invalid_argument(std::string("RobustnessPlan: invalid ") + name + " range");
  }
}

RobustnessOutcome run_setup(const RobustnessPlan& plan, const RobustnessSetup& setup,
                            const AlgorithmConfig& config,
                            std::span<const QTable* const> tables,
                            const BenchmarkPlan& bench, const Grids& grids) {
  const auto session = static_cast<int>(setup.index % tables.size());
  const QTable* table = tables[static_cast<std::size_t>(session)];
  if (table == nullptr) throw std::invalid_argument("run_robustness: missing table");
  const PendulumParams env =
      perturb_params(bench.env, setup.mass_factor, setup.length_factor);
  Rng rng(mix_seed(mix_seed(plan.seed, hash_label(config.label())), setup.index));
  RobustnessOutcome out;
  out.setup = setup;
  out.table_session = session;
  out.record = evaluate_episode(config, *table, grids, env, setup.initial_state,
                                bench.goal, rng)
                   .record;
  return out;
}

void check_inputs(std::span<const QTable* const> tables) {
  if (tables.empty()) throw std::invalid_argument("run_robustness: no trained tables");
  for (const QTable* t : tables) {
    if (t == nullptr) throw std::invalid_argument("run_robustness: missing table");
  }
}

}  // namespace

void RobustnessPlan::validate() const {
  if (num_setups == 0) throw std::invalid_argument("RobustnessPlan: num_setups must be > 0");
  check_range(mass_factor, "mass factor");
  check_range(length_factor, "length factor");
  check_range(angle, "angle");
  check_range(angular_velocity, "angular velocity");
  if (mass_factor.lo < 0.95 || mass_factor.hi > 1.05 || length_factor.lo < 0.95 ||
      length_factor.hi > 1.05) {
    throw std::invalid_argument("RobustnessPlan: factors must stay within [0.95, 1.05]");
  }
  if (angle.lo < -kPi || angle.hi > kPi || angular_velocity.lo < -kMaxAngularVelocity ||
      angular_velocity.hi > kMaxAngularVelocity) {
    throw std::invalid_argument("RobustnessPlan: initial states must lie in the state box");
  }
}

std::vector<RobustnessSetup> robustness_setups(const RobustnessPlan& plan) {
  plan.validate();
  Rng rng(mix_seed(plan.seed, kSamplingTag));
  const std::vector<double> unit = latin_hypercube(plan.num_setups, 4, rng);
  std::vector<RobustnessSetup> setups(plan.num_setups);
  for (std::size_t i = 0; i < plan.num_setups; ++i) {
    const double* u = &unit[i * 4];
    setups[i].index = i;
    setups[i].initial_state = {wrap_angle(plan.angle.at(u[0])),
                               plan.angular_velocity.at(u[1])};
    setups[i].mass_factor = plan.mass_factor.at(u[2]);
    setups[i].length_factor = plan.length_factor.at(u[3]);
  }
  return setups;
}

std::vector<RobustnessOutcome> run_robustness_serial(
    const RobustnessPlan& plan, std::span<const RobustnessSetup> setups,
    const AlgorithmConfig& config, std::span<const QTable* const> tables,
    const BenchmarkPlan& bench, const Grids& grids) {
  check_inputs(tables);
  std::vector<RobustnessOutcome> out;
  out.reserve(setups.size());
  for (const auto& setup : setups) {
    out.push_back(run_setup(plan, setup, config, tables, bench, grids));
  }
  return out;
}

std::vector<RobustnessOutcome> run_robustness_parallel(
    const RobustnessPlan& plan, std::span<const RobustnessSetup> setups,
    const AlgorithmConfig& config, std::span<const QTable* const> tables,
    const BenchmarkPlan& bench, const Grids& grids, int threads) {
  check_inputs(tables);
  const auto n = static_cast<std::ptrdiff_t>(setups.size());
  std::vector<RobustnessOutcome> out(setups.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          run_setup(plan, setups[static_cast<std::size_t>(i)], config, tables, bench, grids);
    } catch (...) {
#pragma omp critical(ctql_robustness_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

RobustnessSummary summarize_robustness(const AlgorithmConfig& config,
                                       std::span<const RobustnessOutcome> outcomes,
                                       double nominal_steady_state_error) {
  RobustnessSummary s;
  s.config = config;
  s.setups = outcomes.size();
  std::vector<double> kg, eg;
  for (const auto& o : outcomes) {
    if (o.record.settling_time) kg.push_back(*o.record.settling_time);
    if (o.record.steady_state_error) eg.push_back(*o.record.steady_state_error);
  }
  auto fill = [&](MetricSummary& m, std::vector<double> v) {
    m.count = v.size();
    m.excluded = outcomes.size() - v.size();
    if (!v.empty()) {
      m.mean = mean(v);
      m.stddev = sample_stddev(v);
    }
    m.values = std::move(v);
  };
  fill(s.settling_time, std::move(kg));
  fill(s.steady_state_error, std::move(eg));
  s.nominal_steady_state_error = nominal_steady_state_error;
  s.centered = s.steady_state_error.count > 0 &&
               std::abs(s.steady_state_error.mean - nominal_steady_state_error) <=
                   2.0 * s.steady_state_error.stddev;
  return s;
}

}  // namespace ctql
