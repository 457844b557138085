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

#include "ctql/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ctql {

namespace fs = std::filesystem;

namespace {

constexpr const char* kQTableTag = "# ctql-qtable v1";
constexpr const char* kQTableColumns = "angle_index,velocity_index,action_index,value";

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename Int>
Int parse_int(std::string_view text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("malformed integer '" + std::string(text) + "'");
  }
  return value;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::ofstream open_out(const fs::path& path, bool append = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::string optional_int(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string optional_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_record_row(std::ostream& out, const AlgorithmConfig& config, int session,
                      const EpisodeRecord& r) {
  out << config.label() << ',' << (config.beta ? format_double(*config.beta) : "")
      << ',' << to_string(config.reward) << ',' << session << ',' << r.episode << ','
      << format_double(r.cumulative_reward) << ',' << format_double(r.tutor_fraction)
      << ',' << (r.goal_met ? 1 : 0) << ',' << optional_int(r.settling_time) << ','
      << optional_double(r.steady_state_error) << '\n';
}

nlohmann::json metric_json(const MetricSummary& m) {
  nlohmann::json j;
  j["count"] = m.count;
  j["excluded"] = m.excluded;
  j["mean"] = m.count ? nlohmann::json(m.mean) : nlohmann::json(nullptr);
  j["stddev"] = m.count ? nlohmann::json(m.stddev) : nlohmann::json(nullptr);
  j["values"] = m.values;
  if (m.vs_ql) {
    j["vs_ql"] = {{"t", m.vs_ql->t}, {"dof", m.vs_ql->dof}, {"p", m.vs_ql->p}};
  } else {
    j["vs_ql"] = nullptr;
  }
  j["significant"] = m.significant;
  return j;
}

nlohmann::json algorithm_json(const AlgorithmConfig& c) {
  return {{"algorithm", c.label()},
          {"kind", to_string(c.kind)},
          {"beta", c.beta ? nlohmann::json(*c.beta) : nlohmann::json(nullptr)},
          {"omega", c.omega()}};
}

AlgorithmConfig config_for_row(const EpisodeRow& row, const AlgorithmConfig& base) {
  AlgorithmConfig c = base;
  c.kind = parse_algorithm_kind(row.algorithm.substr(0, row.algorithm.find('-')));
  c.beta = row.beta;
  c.reward = row.reward;
  if (c.label() != row.algorithm) {
    throw FormatError("algorithm '" + row.algorithm + "' does not match beta column");
  }
  return c;
}

using SessionKey = std::pair<std::string, int>;

std::map<std::string, std::map<int, std::vector<const EpisodeRow*>>> group_rows(
    std::span<const EpisodeRow> rows) {
  std::map<std::string, std::map<int, std::vector<const EpisodeRow*>>> groups;
  for (const auto& row : rows) groups[row.algorithm][row.session].push_back(&row);
  for (auto& [label, sessions] : groups) {
    for (auto& [session, list] : sessions) {
      std::sort(list.begin(), list.end(), [](const EpisodeRow* a, const EpisodeRow* b) {
        return a->record.episode < b->record.episode;
      });
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i]->record.episode != static_cast<int>(i) + 1) {
          throw FormatError("episodes of " + label + " session " +
                            std::to_string(session) + " are not contiguous from 1");
        }
      }
    }
  }
  return groups;
}

SessionLog to_log(const std::vector<const EpisodeRow*>& rows) {
  SessionLog log;
  log.reserve(rows.size());
  for (const EpisodeRow* r : rows) log.push_back(r->record);
  return log;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

void write_qtable(const fs::path& path, const QTable& q, const Grids& grids,
                  const std::string& algorithm, RewardKind reward) {
  if (q.angle_levels() != grids.angle.size() ||
      q.velocity_levels() != grids.velocity.size() ||
      q.action_levels() != grids.action.size()) {
    throw std::invalid_argument("write_qtable: table does not match the grids");
  }
  auto out = open_out(path);
  out << kQTableTag << '\n'
      << "# dims " << q.angle_levels() << ' ' << q.velocity_levels() << ' '
      << q.action_levels() << '\n'
      << "# angle_grid " << hex(grids.angle.checksum()) << '\n'
      << "# velocity_grid " << hex(grids.velocity.checksum()) << '\n'
      << "# action_grid " << hex(grids.action.checksum()) << '\n'
      << "# algorithm " << algorithm << '\n'
      << "# reward " << to_string(reward) << '\n'
      << kQTableColumns << '\n';
  for (std::size_t i = 0; i < q.angle_levels(); ++i) {
    for (std::size_t j = 0; j < q.velocity_levels(); ++j) {
      const auto row = q.row({i, j});
      for (std::size_t a = 0; a < row.size(); ++a) {
        out << i << ',' << j << ',' << a << ',' << format_double(row[a]) << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("write_qtable: failed writing " + path.string());
}

QTableSnapshot read_qtable(const fs::path& path, const Grids& grids) {
  auto in = open_in(path);
  const std::string name = path.string();
  std::string line;
  std::map<std::string, std::string> header;
  if (!std::getline(in, line) || line != kQTableTag) {
    throw FormatError(name + ": not a ctql Q-table snapshot");
  }
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    const auto space = line.find(' ', 2);
    if (space == std::string::npos) throw FormatError(name + ": malformed header line");
    header[line.substr(2, space - 2)] = line.substr(space + 1);
  }
  if (line != kQTableColumns) throw FormatError(name + ": missing column header");

  auto expect = [&](const std::string& key, const std::string& value) {
    const auto it = header.find(key);
    if (it == header.end()) throw FormatError(name + ": header lacks " + key);
    if (it->second != value) {
      throw FormatError(name + ": " + key + " mismatch (snapshot " + it->second +
                        ", current " + value + ")");
    }
  };
  expect("dims", std::to_string(grids.angle.size()) + " " +
                     std::to_string(grids.velocity.size()) + " " +
                     std::to_string(grids.action.size()));
  expect("angle_grid", hex(grids.angle.checksum()));
  expect("velocity_grid", hex(grids.velocity.checksum()));
  expect("action_grid", hex(grids.action.checksum()));
  if (!header.count("algorithm") || !header.count("reward")) {
    throw FormatError(name + ": header lacks algorithm or reward");
  }

  QTableSnapshot snap{QTable(grids), header["algorithm"],
                      parse_reward_kind(header["reward"])};
  std::vector<char> seen(snap.table.size(), 0);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 4) {
      throw FormatError(name + ": row " + std::to_string(rows + 1) + " is malformed");
    }
    const auto i = parse_int<std::size_t>(fields[0]);
    const auto j = parse_int<std::size_t>(fields[1]);
    const auto a = parse_int<std::size_t>(fields[2]);
    if (i >= grids.angle.size() || j >= grids.velocity.size() || a >= grids.action.size()) {
      throw FormatError(name + ": index out of range in row " + std::to_string(rows + 1));
    }
    const double value = parse_double(fields[3]);
    if (!std::isfinite(value)) throw FormatError(name + ": non-finite Q value");
    const std::size_t flat = (i * grids.velocity.size() + j) * grids.action.size() + a;
    if (seen[flat]) throw FormatError(name + ": duplicate entry");
    seen[flat] = 1;
    snap.table.at({i, j}, a) = value;
    ++rows;
  }
  if (rows != snap.table.size()) {
    throw FormatError(name + ": truncated snapshot (" + std::to_string(rows) + " of " +
                      std::to_string(snap.table.size()) + " entries)");
  }
  return snap;
}

void write_episode_csv(const fs::path& path, std::span<const SessionResult> sessions) {
  auto out = open_out(path);
  out << kEpisodeCsvHeader << '\n';
  for (const auto& s : sessions) {
    for (const auto& r : s.log) write_record_row(out, s.config, s.session, r);
  }
}

void write_evaluation_csv(const fs::path& path, std::span<const SessionResult> sessions) {
  auto out = open_out(path);
  out << kEpisodeCsvHeader << '\n';
  for (const auto& s : sessions) write_record_row(out, s.config, s.session, s.evaluation);
}

std::vector<EpisodeRow> read_episode_csv(const fs::path& path) {
  auto in = open_in(path);
  const std::string name = path.string();
  std::string line;
  if (!std::getline(in, line) || line != kEpisodeCsvHeader) {
    throw FormatError(name + ": unexpected header");
  }
  std::vector<EpisodeRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto f = split(line);
      if (f.size() != 10) throw FormatError("expected 10 fields");
      EpisodeRow row;
      row.algorithm = std::string(f[0]);
      if (!f[1].empty()) row.beta = parse_double(f[1]);
      row.reward = parse_reward_kind(std::string(f[2]));
      row.session = parse_int<int>(f[3]);
      row.record.episode = parse_int<int>(f[4]);
      row.record.cumulative_reward = parse_double(f[5]);
      row.record.tutor_fraction = parse_double(f[6]);
      const int goal = parse_int<int>(f[7]);
      if (goal != 0 && goal != 1) throw FormatError("goal_met must be 0 or 1");
      row.record.goal_met = goal == 1;
      if (!f[8].empty()) row.record.settling_time = parse_int<int>(f[8]);
      if (!f[9].empty()) row.record.steady_state_error = parse_double(f[9]);
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      throw FormatError(name + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

void write_robustness_csv(const fs::path& path, std::span<const RobustnessOutcome> outcomes,
                          const AlgorithmConfig& config, bool append) {
  const bool fresh = !append || !fs::exists(path);
  auto out = open_out(path, !fresh);
  if (fresh) {
    out << "algorithm,beta,reward_kind,setup,table_session,initial_angle,"
           "initial_velocity,mass_factor,length_factor,goal_met,settling_time,"
           "steady_state_error,cumulative_reward\n";
  }
  for (const auto& o : outcomes) {
    out << config.label() << ',' << (config.beta ? format_double(*config.beta) : "")
        << ',' << to_string(config.reward) << ',' << o.setup.index << ','
        << o.table_session << ',' << format_double(o.setup.initial_state.angle) << ','
        << format_double(o.setup.initial_state.angular_velocity) << ','
        << format_double(o.setup.mass_factor) << ','
        << format_double(o.setup.length_factor) << ',' << (o.record.goal_met ? 1 : 0)
        << ',' << optional_int(o.record.settling_time) << ','
        << optional_double(o.record.steady_state_error) << ','
        << format_double(o.record.cumulative_reward) << '\n';
  }
}

void write_curves_csv(const fs::path& path, std::span<const LearningCurve> curves) {
  auto out = open_out(path);
  out << "algorithm,beta,reward_kind,episode,reward_mean,reward_std,tutor_mean,tutor_std\n";
  for (const auto& c : curves) {
    const std::string prefix = c.config.label() + "," +
                               (c.config.beta ? format_double(*c.config.beta) : "") +
                               "," + to_string(c.config.reward) + ",";
    for (std::size_t e = 0; e < c.reward_mean.size(); ++e) {
      out << prefix << e + 1 << ',' << format_double(c.reward_mean[e]) << ','
          << format_double(c.reward_std[e]) << ',' << format_double(c.tutor_mean[e])
          << ',' << format_double(c.tutor_std[e]) << '\n';
    }
  }
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json algorithms = nlohmann::json::array();
  for (const auto& a : report.algorithms) {
    nlohmann::json j = algorithm_json(a.config);
    j["metrics"] = {
        {"terminal_episode", metric_json(a.terminal_episode)},
        {"j_avg", metric_json(a.j_avg)},
        {"j_avg_t", metric_json(a.j_avg_t)},
        {"settling_time", metric_json(a.settling_time)},
        {"steady_state_error", metric_json(a.steady_state_error)},
        {"tutor_fraction_first_500", metric_json(a.tutor_fraction_early)},
        {"tutor_fraction_last_500", metric_json(a.tutor_fraction_late)},
    };
    algorithms.push_back(std::move(j));
  }
  return {{"reward", to_string(report.reward)},
          {"significance_level", kSignificanceLevel},
          {"algorithms", std::move(algorithms)}};
}

nlohmann::json to_json(const RobustnessSummary& s) {
  nlohmann::json j = algorithm_json(s.config);
  j["reward"] = to_string(s.config.reward);
  j["setups"] = s.setups;
  auto brief = [](const MetricSummary& m) {
    return nlohmann::json{
        {"count", m.count},
        {"excluded", m.excluded},
        {"mean", m.count ? nlohmann::json(m.mean) : nlohmann::json(nullptr)},
        {"stddev", m.count ? nlohmann::json(m.stddev) : nlohmann::json(nullptr)}};
  };
  j["settling_time"] = brief(s.settling_time);
  j["steady_state_error"] = brief(s.steady_state_error);
  j["nominal_steady_state_error"] = s.nominal_steady_state_error;
  j["centered_within_2_stddev"] = s.centered;
  return j;
}

nlohmann::json grids_to_json(const Grids& grids) {
  auto one = [](const Grid& g) {
    return nlohmann::json{{"checksum", hex(g.checksum())},
                          {"levels", std::vector<double>(g.levels().begin(), g.levels().end())}};
  };
  return {{"angle", one(grids.angle)},
          {"velocity", one(grids.velocity)},
          {"action", one(grids.action)}};
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<SessionMetrics> metrics_from_rows(std::span<const EpisodeRow> episodes,
                                              std::span<const EpisodeRow> evaluations,
                                              const AlgorithmConfig& base) {
  std::map<SessionKey, const EpisodeRow*> eval;
  for (const auto& row : evaluations) {
    if (!eval.emplace(SessionKey{row.algorithm, row.session}, &row).second) {
      throw FormatError("duplicate evaluation row for " + row.algorithm + " session " +
                        std::to_string(row.session));
    }
  }
  std::vector<SessionMetrics> out;
  for (const auto& [label, sessions] : group_rows(episodes)) {
    for (const auto& [session, rows] : sessions) {
      const auto it = eval.find({label, session});
      if (it == eval.end()) {
        throw FormatError("no evaluation row for " + label + " session " +
                          std::to_string(session));
      }
      const SessionLog log = to_log(rows);
      out.push_back(session_metrics(config_for_row(*rows.front(), base), session, log,
                                    it->second->record));
    }
  }
  return out;
}

std::vector<LearningCurve> curves_from_rows(std::span<const EpisodeRow> episodes,
                                            const AlgorithmConfig& base) {
  std::vector<AlgorithmConfig> configs;
  std::vector<std::vector<SessionLog>> logs;
  for (const auto& [label, sessions] : group_rows(episodes)) {
    configs.push_back(config_for_row(*sessions.begin()->second.front(), base));
    auto& l = logs.emplace_back();
    for (const auto& [session, rows] : sessions) l.push_back(to_log(rows));
  }
  // Canonical algorithm order.
  std::vector<std::size_t> order(configs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(configs[a], configs[b]);
  });
  std::vector<AlgorithmConfig> sorted_configs;
  std::vector<std::vector<const SessionLog*>> pointers;
  for (std::size_t i : order) {
    sorted_configs.push_back(configs[i]);
    auto& p = pointers.emplace_back();
    for (const auto& log : logs[i]) p.push_back(&log);
  }
  return learning_curves(sorted_configs, pointers);
}

}  // namespace ctql
