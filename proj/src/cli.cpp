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

#include "ctql/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ctql/config.hpp"
#include "ctql/experiment.hpp"
#include "ctql/io.hpp"

namespace ctql {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "CTQL_OUT_DIR";

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string algorithms;
  std::string reward;
  std::optional<int> parallelism;
  bool unsafe = false;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path resolve_out_dir(const GlobalOptions& g, const std::string& fallback) {
  if (!g.out_dir.empty()) return g.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return fallback;
}

// Applies command-line overrides on top of a loaded configuration.
ExperimentConfig apply_overrides(ExperimentConfig config, const GlobalOptions& g) {
  if (g.seed) config.seed = *g.seed;
  if (!g.reward.empty()) config.reward = parse_reward_kind(g.reward);
  if (!g.algorithms.empty()) {
    std::string yaml = "algorithms: [";
    for (const auto& a : split_list(g.algorithms)) yaml += a + ",";
    yaml += "]";
    config.algorithms = parse_config(yaml, "--algorithms").algorithms;
  }
  if (g.parallelism) {
    if (*g.parallelism < 0) throw std::invalid_argument("--parallelism must be >= 0");
    config.parallelism = *g.parallelism;
  }
  if (g.unsafe) config.unsafe = true;
  config.plan();  // validates the combination
  return config;
}

ExperimentConfig load_with_overrides(const GlobalOptions& g,
                                     const fs::path& fallback_config = {}) {
  ExperimentConfig config;
  if (!g.config.empty()) {
    config = load_config(g.config);
  } else if (!fallback_config.empty() && fs::exists(fallback_config)) {
    config = load_config(fallback_config);
  }
  return apply_overrides(std::move(config), g);
}

std::string cell(const MetricSummary& m, int precision) {
  if (m.count == 0) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << m.mean << " +- " << m.stddev;
  if (m.significant) os << " *";
  if (m.excluded) os << " (" << m.excluded << " n/a)";
  return os.str();
}

void print_report(std::ostream& out, const ComparisonReport& report) {
  out << "reward: " << to_string(report.reward)
      << "   (* = Welch p < 0.05 against ql)\n";
  out << std::left << std::setw(16) << "algorithm" << std::setw(26) << "E_t"
      << std::setw(28) << "J_avg" << std::setw(28) << "J_avg,t" << std::setw(24)
      << "k_g" << "e_g\n";
  for (const auto& a : report.algorithms) {
    out << std::left << std::setw(16) << a.config.label() << std::setw(26)
        << cell(a.terminal_episode, 1) << std::setw(28) << cell(a.j_avg, 2)
        << std::setw(28) << cell(a.j_avg_t, 2) << std::setw(24)
        << cell(a.settling_time, 1) << cell(a.steady_state_error, 4) << '\n';
  }
}

std::string qtable_name(const AlgorithmConfig& c, int session) {
  return c.label() + "_s" + std::to_string(session) + ".csv";
}

nlohmann::json repairs() {
  return {
      "gym_reward_is_negated_cost",
      "terminal_average_normalized_by_tail_length",
      "steady_state_error_measured_to_goal_state",
      "learning_rate_episodes_counted_from_1",
      "terminal_window_inclusive_31_episodes",
      "linear_model_first_row_as_published",
  };
}

int cmd_train(const GlobalOptions& g, std::optional<int> sessions,
              std::optional<int> episodes, std::ostream& out) {
  ExperimentConfig config = load_with_overrides(g);
  if (sessions) config.sessions = *sessions;
  if (episodes) config.episodes = *episodes;
  const BenchmarkPlan plan = config.plan();
  const fs::path dir = resolve_out_dir(g, "ctql-out");
  fs::create_directories(dir / "qtables");

  const std::string started = utc_now();
  const Grids grids;
  const BenchmarkResult result = run_benchmark(plan, grids);

  write_episode_csv(dir / "episodes.csv", result.sessions);
  write_evaluation_csv(dir / "evaluation.csv", result.sessions);
  for (const auto& s : result.sessions) {
    write_qtable(dir / "qtables" / qtable_name(s.config, s.session), s.table, grids,
                 s.config.label(), s.config.reward);
  }
  write_curves_csv(dir / "curves.csv", learning_curves(result.sessions));
  write_text(dir / "summary.json", to_json(result.report).dump(2) + "\n");
  write_text(dir / "resolved_config.json", config.to_json().dump(2) + "\n");

  nlohmann::json labels = nlohmann::json::array();
  for (const auto& a : plan.algorithms) labels.push_back(a.label());
  const nlohmann::json manifest{
      {"tool", "ctql"},
      {"version", kToolVersion},
      {"config", config.to_json()},
      {"master_seed", plan.master_seed},
      {"algorithms", labels},
      {"grids", grids_to_json(grids)},
      {"repairs", repairs()},
      {"evaluation", "frozen: no table updates, exploration disabled, switching kept"},
      {"replay", "ctql train --config resolved_config.json"},
      {"started_at", started},
      {"finished_at", utc_now()},
  };
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  print_report(out, result.report);
  out << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& qtable_path,
                 const std::string& algorithm, int session, std::ostream& out) {
  ExperimentConfig config = load_with_overrides(g);
  const Grids grids;
  const QTableSnapshot snap = read_qtable(qtable_path, grids);
  config.reward = snap.reward;
  const AlgorithmConfig alg =
      algorithm_from_label(algorithm.empty() ? snap.algorithm : algorithm, config);
  BenchmarkPlan plan = config.plan();
  const EpisodeRecord r = evaluate_nominal(alg, snap.table, plan, grids, session);

  nlohmann::json j{{"algorithm", alg.label()},
                   {"reward", to_string(alg.reward)},
                   {"session", session},
                   {"goal_met", r.goal_met ? 1 : 0},
                   {"settling_time", r.settling_time ? nlohmann::json(*r.settling_time)
                                                     : nlohmann::json(nullptr)},
                   {"steady_state_error", r.steady_state_error
                                              ? nlohmann::json(*r.steady_state_error)
                                              : nlohmann::json(nullptr)},
                   {"cumulative_reward", r.cumulative_reward}};
  out << j.dump(2) << '\n';
  if (!g.out_dir.empty()) {
    write_text(fs::path(g.out_dir) / ("evaluate_" + alg.label() + ".json"), j.dump(2) + "\n");
  }
  return 0;
}

int cmd_robustness(const GlobalOptions& g, const std::string& in_dir_opt,
                   std::ostream& out) {
  const fs::path out_dir = resolve_out_dir(g, "ctql-out");
  const fs::path in_dir = in_dir_opt.empty() ? out_dir : fs::path(in_dir_opt);
  const ExperimentConfig config = load_with_overrides(g, in_dir / "resolved_config.json");
  const BenchmarkPlan plan = config.plan();
  const Grids grids;

  const auto evaluations = read_episode_csv(in_dir / "evaluation.csv");
  const auto setups = robustness_setups(config.robustness);
  int threads = plan.parallelism;
  if (threads == 0) threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

  fs::create_directories(out_dir);
  const fs::path csv = out_dir / "robustness.csv";
  fs::remove(csv);
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& alg : plan.algorithms) {
    std::vector<QTable> tables;
    for (int s = 0; s < plan.sessions; ++s) {
      const auto snap = read_qtable(in_dir / "qtables" / qtable_name(alg, s), grids);
      if (snap.algorithm != alg.label()) {
        throw FormatError("snapshot for " + alg.label() + " holds " + snap.algorithm);
      }
      tables.push_back(snap.table);
    }
    std::vector<const QTable*> pointers;
    for (const auto& t : tables) pointers.push_back(&t);

    std::vector<double> nominal;
    for (const auto& row : evaluations) {
      if (row.algorithm == alg.label() && row.record.steady_state_error) {
        nominal.push_back(*row.record.steady_state_error);
      }
    }
    const auto outcomes = threads == 1
        ? run_robustness_serial(config.robustness, setups, alg, pointers, plan, grids)
        : run_robustness_parallel(config.robustness, setups, alg, pointers, plan, grids,
                                  threads);
    write_robustness_csv(csv, outcomes, alg, true);
    const auto summary = summarize_robustness(alg, outcomes, nominal.empty() ? 0.0 : mean(nominal));
    summaries.push_back(to_json(summary));
    out << std::left << std::setw(16) << alg.label() << " settled "
        << summary.steady_state_error.count << "/" << summary.setups << "  e_g "
        << cell(summary.steady_state_error, 4) << "  nominal "
        << summary.nominal_steady_state_error
        << (summary.centered ? "  centered" : "  shifted") << '\n';
  }
  write_text(out_dir / "robustness_summary.json",
             nlohmann::json{{"reward", to_string(plan.reward)},
                            {"setups", config.robustness.num_setups},
                            {"algorithms", summaries}}
                     .dump(2) +
                 "\n");
  return 0;
}

int cmd_report(const GlobalOptions& g, const std::string& in_dir_opt, std::ostream& out) {
  const fs::path out_dir = resolve_out_dir(g, "ctql-out");
  const fs::path in_dir = in_dir_opt.empty() ? out_dir : fs::path(in_dir_opt);
  ExperimentConfig config;
  if (!g.config.empty()) {
    config = load_config(g.config);
  } else if (fs::exists(in_dir / "resolved_config.json")) {
    config = load_config(in_dir / "resolved_config.json");
  }
  const auto episodes = read_episode_csv(in_dir / "episodes.csv");
  const auto evaluations = read_episode_csv(in_dir / "evaluation.csv");
  const auto metrics = metrics_from_rows(episodes, evaluations, config.base);
  const ComparisonReport report = compare(metrics);

  fs::create_directories(out_dir);
  write_text(out_dir / "summary.json", to_json(report).dump(2) + "\n");
  write_curves_csv(out_dir / "curves.csv", curves_from_rows(episodes, config.base));
  print_report(out, report);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Control-tutored Q-learning on the inverted pendulum benchmark", "ctql"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GlobalOptions g;
  std::uint64_t seed = 0;
  int parallelism = 0;
  app.add_option("--config", g.config, "YAML configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Output directory (env CTQL_OUT_DIR)");
  app.add_option("--algorithms", g.algorithms,
                 "Comma list of ql, ctql, pctql, pctql:<beta>");
  app.add_option("--reward", g.reward, "distance or gym")
      ->check(CLI::IsMember({"distance", "gym"}));
  auto* par_opt = app.add_option("--parallelism", parallelism,
                                 "Maximum concurrent sessions (0 = all threads)");
  app.add_flag("--unsafe", g.unsafe, "Allow CTQL with the gym reward");

  auto* train = app.add_subcommand("train", "Run the benchmark and write all outputs");
  std::optional<int> sessions, episodes;
  train->add_option("--sessions", sessions, "Override the number of sessions");
  train->add_option("--episodes", episodes, "Override the number of episodes");

  auto* evaluate = app.add_subcommand("evaluate", "Nominal control metrics of a snapshot");
  std::string qtable_path, algorithm;
  int session = 0;
  evaluate->add_option("--qtable", qtable_path, "Q-table snapshot")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--algorithm", algorithm, "Label overriding the snapshot header");
  evaluate->add_option("--session", session, "Session index used for the seed");

  auto* robustness = app.add_subcommand("robustness", "Perturbed-conditions sweep");
  std::string robustness_in;
  robustness->add_option("--in-dir", robustness_in, "Directory written by train");

  auto* report = app.add_subcommand("report", "Recompute summaries from CSV output");
  std::string report_in;
  report->add_option("--in-dir", report_in, "Directory written by train");

  for (auto* sub : {train, evaluate, robustness, report}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostream& stream = e.get_exit_code() == 0 ? out : err;
    return app.exit(e, stream, stream);
  }
  if (seed_opt->count()) g.seed = seed;
  if (par_opt->count()) g.parallelism = parallelism;

  try {
    if (*train) {
      return cmd_train(g, sessions, episodes, out);
    }
    if (*evaluate) return cmd_evaluate(g, qtable_path, algorithm, session, out);
    if (*robustness) return cmd_robustness(g, robustness_in, out);
    if (*report) return cmd_report(g, report_in, out);
  } catch (const std::exception& e) {
    err << "ctql: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace ctql
