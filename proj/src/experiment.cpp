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

#include "ctql/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctql {

void BenchmarkPlan::validate() const {
  if (sessions < 1 || episodes < 1) {
    throw std::invalid_argument("sessions and episodes must be positive");
  }
  goal.validate();
  if (algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  for (const auto& a : algorithms) {
    a.validate();
    if (a.reward != reward) {
      throw std::invalid_argument("algorithm " + a.label() +
                                  " uses a different reward than the plan");
    }
  }
  if (!(velocity_noise_std >= 0.0)) {
    throw std::invalid_argument("velocity_noise_std must be non-negative");
  }
  if (parallelism < 0) throw std::invalid_argument("parallelism must be >= 0");
}

std::vector<AlgorithmConfig> default_algorithms(RewardKind reward,
                                                const AlgorithmConfig& base,
                                                std::span<const double> betas,
                                                bool allow_unsafe) {
  std::vector<AlgorithmConfig> out;
  AlgorithmConfig c = base;
  c.reward = reward;
  c.beta.reset();
  c.allow_unsafe = allow_unsafe;
  c.kind = AlgorithmKind::kQL;
  out.push_back(c);
  if (reward == RewardKind::kDistance || allow_unsafe) {
    c.kind = AlgorithmKind::kCTQL;
    out.push_back(c);
  }
  c.kind = AlgorithmKind::kPCTQL;
  for (double beta : betas) {
    c.beta = beta;
    out.push_back(c);
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string stream_key(const AlgorithmConfig& config) {
  return config.label() + "/" + to_string(config.reward);
}

constexpr std::uint64_t kEvaluationTag = 0x6576616c75617465ULL;  // "evaluate"

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ b);
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t session_seed(std::uint64_t master, const AlgorithmConfig& config,
                           int session) {
  return mix_seed(mix_seed(master, hash_label(stream_key(config))),
                  static_cast<std::uint64_t>(session));
}

EpisodeRecord evaluate_nominal(const AlgorithmConfig& config, const QTable& table,
                               const BenchmarkPlan& plan, const Grids& grids,
                               int session) {
  Rng rng(mix_seed(session_seed(plan.master_seed, config, session), kEvaluationTag));
  return evaluate_episode(config, table, grids, plan.env, plan.initial_state,
                          plan.goal, rng)
      .record;
}

SessionResult run_session(const AlgorithmConfig& config, const BenchmarkPlan& plan,
                          const Grids& grids, int session) {
  SessionResult result{config, session, {}, QTable(grids), {}};
  result.log.reserve(static_cast<std::size_t>(plan.episodes));
  Rng rng(session_seed(plan.master_seed, config, session));
  const EpisodeOptions options{.learn = true,
                               .velocity_noise_std = plan.velocity_noise_std};
  for (int e = 1; e <= plan.episodes; ++e) {
    result.log.push_back(run_episode(config, result.table, grids, plan.env,
                                     plan.initial_state, e, plan.goal, rng, options)
                             .record);
  }
  result.evaluation = evaluate_nominal(config, result.table, plan, grids, session);
  return result;
}

std::vector<SessionResult> run_sessions_serial(const BenchmarkPlan& plan,
                                               const Grids& grids) {
  std::vector<SessionResult> out;
  for (const auto& config : plan.algorithms) {
    for (int s = 0; s < plan.sessions; ++s) {
      out.push_back(run_session(config, plan, grids, s));
    }
  }
  return out;
}

std::vector<SessionResult> run_sessions_parallel(const BenchmarkPlan& plan,
                                                 const Grids& grids, int threads) {
  const int jobs = static_cast<int>(plan.algorithms.size()) * plan.sessions;
  std::vector<std::optional<SessionResult>> slots(static_cast<std::size_t>(jobs));
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1))
  for (int job = 0; job < jobs; ++job) {
    try {
      const auto& config = plan.algorithms[static_cast<std::size_t>(job / plan.sessions)];
      slots[static_cast<std::size_t>(job)] =
          run_session(config, plan, grids, job % plan.sessions);
    } catch (...) {
#pragma omp critical(ctql_session_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SessionResult> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

SessionMetrics session_metrics(const AlgorithmConfig& config, int session,
                               std::span<const EpisodeRecord> log,
                               const EpisodeRecord& evaluation) {
  SessionMetrics m;
  m.config = config;
  m.session = session;
  m.j_avg = avg_cumulative_reward(log);
  m.terminal_episode = terminal_episode(log);
  if (m.terminal_episode) m.j_avg_t = avg_reward_after_terminal(log, *m.terminal_episode);
  m.eval_goal_met = evaluation.goal_met;
  m.settling_time = evaluation.settling_time;
  m.steady_state_error = evaluation.steady_state_error;

  const std::size_t window = std::min(log.size(), std::size_t{kTutorUsageWindow});
  double early = 0.0;
  double late = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    early += log[i].tutor_fraction;
    late += log[log.size() - window + i].tutor_fraction;
  }
  m.tutor_fraction_early = early / static_cast<double>(window);
  m.tutor_fraction_late = late / static_cast<double>(window);
  return m;
}

SessionMetrics session_metrics(const SessionResult& result) {
  return session_metrics(result.config, result.session, result.log, result.evaluation);
}

bool canonical_less(const AlgorithmConfig& a, const AlgorithmConfig& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  return a.beta.value_or(0.0) > b.beta.value_or(0.0);
}

const AlgorithmSummary* ComparisonReport::find(const std::string& label) const {
  for (const auto& a : algorithms) {
    if (a.config.label() == label) return &a;
  }
  return nullptr;
}

namespace {

MetricSummary summarize(std::vector<double> values, std::size_t total) {
  MetricSummary s;
  s.count = values.size();
  s.excluded = total - values.size();
  if (!values.empty()) {
    s.mean = mean(values);
    s.stddev = sample_stddev(values);
  }
  s.values = std::move(values);
  return s;
}

void attach_welch(MetricSummary& metric, const MetricSummary& baseline) {
  try {
    metric.vs_ql = welch_t_test(metric.values, baseline.values);
    metric.significant = metric.vs_ql->p < kSignificanceLevel;
  } catch (const std::invalid_argument&) {
    metric.vs_ql.reset();
    metric.significant = false;
  }
}

}  // namespace

ComparisonReport compare(std::span<const SessionMetrics> metrics) {
  ComparisonReport report;
  if (metrics.empty()) return report;
  report.reward = metrics.front().config.reward;

  std::map<std::string, std::vector<const SessionMetrics*>> groups;
  for (const auto& m : metrics) {
    if (m.config.reward != report.reward) {
      throw std::invalid_argument("compare: sessions mix reward kinds");
    }
    groups[m.config.label()].push_back(&m);
  }

  for (auto& [label, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const SessionMetrics* a, const SessionMetrics* b) {
                return a->session < b->session;
              });
    std::vector<double> et, javg, javgt, kg, eg, early, late;
    for (const SessionMetrics* m : group) {
      if (m->terminal_episode) et.push_back(*m->terminal_episode);
      javg.push_back(m->j_avg);
      if (m->j_avg_t) javgt.push_back(*m->j_avg_t);
      if (m->settling_time) kg.push_back(*m->settling_time);
      if (m->steady_state_error) eg.push_back(*m->steady_state_error);
      early.push_back(m->tutor_fraction_early);
      late.push_back(m->tutor_fraction_late);
    }
    const std::size_t n = group.size();
    AlgorithmSummary summary;
    summary.config = group.front()->config;
    summary.terminal_episode = summarize(std::move(et), n);
    summary.j_avg = summarize(std::move(javg), n);
    summary.j_avg_t = summarize(std::move(javgt), n);
    summary.settling_time = summarize(std::move(kg), n);
    summary.steady_state_error = summarize(std::move(eg), n);
    summary.tutor_fraction_early = summarize(std::move(early), n);
    summary.tutor_fraction_late = summarize(std::move(late), n);
    report.algorithms.push_back(std::move(summary));
  }

  std::sort(report.algorithms.begin(), report.algorithms.end(),
            [](const AlgorithmSummary& a, const AlgorithmSummary& b) {
              return canonical_less(a.config, b.config);
            });

  const AlgorithmSummary* ql = report.find("ql");
  if (ql) {
    const AlgorithmSummary baseline = *ql;
    for (auto& a : report.algorithms) {
      if (a.config.kind == AlgorithmKind::kQL) continue;
      attach_welch(a.terminal_episode, baseline.terminal_episode);
      attach_welch(a.j_avg, baseline.j_avg);
      attach_welch(a.j_avg_t, baseline.j_avg_t);
      attach_welch(a.settling_time, baseline.settling_time);
      attach_welch(a.steady_state_error, baseline.steady_state_error);
    }
  }
  return report;
}

BenchmarkResult run_benchmark(const BenchmarkPlan& plan, const Grids& grids) {
  plan.validate();
  BenchmarkResult result;
  if (plan.parallelism == 1) {
    result.sessions = run_sessions_serial(plan, grids);
  } else {
    int threads = plan.parallelism;
#ifdef _OPENMP
    if (threads == 0) threads = omp_get_max_threads();
#else
    if (threads == 0) threads = 1;
#endif
    result.sessions = run_sessions_parallel(plan, grids, threads);
  }
  std::vector<SessionMetrics> metrics;
  metrics.reserve(result.sessions.size());
  for (const auto& s : result.sessions) metrics.push_back(session_metrics(s));
  result.report = compare(metrics);
  return result;
}

std::vector<LearningCurve> learning_curves(
    std::span<const AlgorithmConfig> configs,
    std::span<const std::vector<const SessionLog*>> logs_per_config, int window) {
  if (configs.size() != logs_per_config.size()) {
    throw std::invalid_argument("learning_curves: configs and logs differ in length");
  }
  std::vector<LearningCurve> curves;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& logs = logs_per_config[c];
    if (logs.empty()) throw std::invalid_argument("learning_curves: no sessions");
    std::size_t episodes = logs.front()->size();
    for (const SessionLog* log : logs) episodes = std::min(episodes, log->size());

    std::vector<double> r_mean(episodes), r_std(episodes), t_mean(episodes),
        t_std(episodes), rewards(logs.size()), tutor(logs.size());
    for (std::size_t e = 0; e < episodes; ++e) {
      for (std::size_t s = 0; s < logs.size(); ++s) {
        rewards[s] = (*logs[s])[e].cumulative_reward;
        tutor[s] = (*logs[s])[e].tutor_fraction;
      }
      r_mean[e] = mean(rewards);
      r_std[e] = sample_stddev(rewards);
      t_mean[e] = mean(tutor);
      t_std[e] = sample_stddev(tutor);
    }
    curves.push_back({configs[c], moving_average(r_mean, window),
                      moving_average(r_std, window), moving_average(t_mean, window),
                      moving_average(t_std, window)});
  }
  return curves;
}

std::vector<LearningCurve> learning_curves(std::span<const SessionResult> sessions,
                                           int window) {
  std::map<std::string, std::vector<const SessionResult*>> groups;
  for (const auto& s : sessions) groups[s.config.label()].push_back(&s);
  std::vector<std::vector<const SessionResult*>> ordered;
  for (auto& [label, group] : groups) {
    std::sort(group.begin(), group.end(), [](const SessionResult* a, const SessionResult* b) {
      return a->session < b->session;
    });
    ordered.push_back(group);
  }
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return canonical_less(a.front()->config, b.front()->config);
  });
  std::vector<AlgorithmConfig> configs;
  std::vector<std::vector<const SessionLog*>> logs;
  for (const auto& group : ordered) {
    configs.push_back(group.front()->config);
    auto& l = logs.emplace_back();
    for (const SessionResult* s : group) l.push_back(&s->log);
  }
  return learning_curves(configs, logs, window);
}

}  // namespace ctql
