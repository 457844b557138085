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

#include "ctql/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ctql {

namespace {

std::string where(const std::string& source, const YAML::Mark& mark) {
  return source + ":" + std::to_string(mark.line + 1) + ":" +
         std::to_string(mark.column + 1);
}

template <typename T>
T scalar(const YAML::Node& node) {
  if (!node.IsScalar()) throw std::invalid_argument("expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw std::invalid_argument("cannot parse '" + node.Scalar() + "'");
  }
}

double finite_number(const YAML::Node& node) {
  const double v = scalar<double>(node);
  if (!std::isfinite(v)) throw std::invalid_argument("value must be finite");
  return v;
}

double positive(const YAML::Node& node) {
  const double v = finite_number(node);
  if (!(v > 0.0)) throw std::invalid_argument("value must be positive");
  return v;
}

int positive_int(const YAML::Node& node) {
  const int v = scalar<int>(node);
  if (v < 1) throw std::invalid_argument("value must be a positive integer");
  return v;
}

double open_probability(const YAML::Node& node) {
  const double v = finite_number(node);
  if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("value must lie in (0, 1)");
  return v;
}

double beta_value(const YAML::Node& node) {
  const double v = finite_number(node);
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  return v;
}

std::vector<double> number_list(const YAML::Node& node, std::size_t expected = 0) {
  if (!node.IsSequence()) throw std::invalid_argument("expected a list");
  if (expected != 0 && node.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " entries");
  }
  std::vector<double> out;
  for (const auto& item : node) out.push_back(finite_number(item));
  return out;
}

Range range_of(const YAML::Node& node) {
  const auto v = number_list(node, 2);
  if (v[0] > v[1]) throw std::invalid_argument("range lower bound exceeds upper bound");
  return {v[0], v[1]};
}

Integrator parse_integrator(const std::string& text) {
  if (text == "forward-euler") return Integrator::kForwardEuler;
  if (text == "semi-implicit") return Integrator::kSemiImplicit;
  throw std::invalid_argument("integrator must be forward-euler or semi-implicit");
}

const char* integrator_name(Integrator integrator) {
  return integrator == Integrator::kForwardEuler ? "forward-euler" : "semi-implicit";
}

void check_algorithm_name(const std::string& name) {
  if (name == "ql" || name == "ctql" || name == "pctql") return;
  if (name.rfind("pctql:", 0) == 0) {
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(name.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != name.size() - 6) {
      throw std::invalid_argument("malformed algorithm '" + name + "'");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("beta in '" + name + "' must lie in [0, 1]");
    }
    return;
  }
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected ql, ctql, pctql or pctql:<beta>)");
}

struct PendingEnv {
  double mass = 1.0;
  double length = 1.0;
  double gravity = 10.0;
  double sample_time = 0.05;
  Integrator integrator = Integrator::kForwardEuler;
};

using Handler = std::function<void(const YAML::Node&)>;

void apply_mapping(const YAML::Node& map, const std::map<std::string, Handler>& handlers,
                   const std::string& source) {
  if (!map.IsMap()) {
    throw ConfigError(where(source, map.Mark()) + ": expected a mapping of key: value");
  }
  for (const auto& entry : map) {
    const std::string key = entry.first.Scalar();
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw ConfigError(where(source, entry.first.Mark()) + ": unknown key '" + key + "'");
    }
    try {
      it->second(entry.second);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where(source, entry.second.Mark()) + ": " + key + ": " + e.what());
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(where(source, e.mark) + ": " + e.msg);
  }

  ExperimentConfig config;
  if (root.IsNull()) return config;

  PendingEnv env;
  Hyperparams& hp = config.base.hyperparams;
  RewardParams& rp = config.base.reward_params;
  std::optional<double> eta;
  std::optional<double> eta_fraction;

  const std::map<std::string, Handler> robustness_keys{
      {"setups", [&](const YAML::Node& n) {
         config.robustness.num_setups = static_cast<std::size_t>(positive_int(n));
       }},
      {"mass_factor", [&](const YAML::Node& n) { config.robustness.mass_factor = range_of(n); }},
      {"length_factor", [&](const YAML::Node& n) { config.robustness.length_factor = range_of(n); }},
      {"angle", [&](const YAML::Node& n) { config.robustness.angle = range_of(n); }},
      {"velocity", [&](const YAML::Node& n) { config.robustness.angular_velocity = range_of(n); }},
      {"seed", [&](const YAML::Node& n) { config.robustness.seed = scalar<std::uint64_t>(n); }},
  };

  const std::map<std::string, Handler> keys{
      {"sessions", [&](const YAML::Node& n) { config.sessions = positive_int(n); }},
      {"episodes", [&](const YAML::Node& n) { config.episodes = positive_int(n); }},
      {"horizon", [&](const YAML::Node& n) { config.goal.horizon = positive_int(n); }},
      {"n_minus", [&](const YAML::Node& n) { config.goal.n_minus = positive_int(n); }},
      {"eta", [&](const YAML::Node& n) { eta = positive(n); }},
      {"eta_fraction", [&](const YAML::Node& n) { eta_fraction = positive(n); }},
      {"seed", [&](const YAML::Node& n) { config.seed = scalar<std::uint64_t>(n); }},
      {"reward", [&](const YAML::Node& n) { config.reward = parse_reward_kind(scalar<std::string>(n)); }},
      {"algorithms", [&](const YAML::Node& n) {
         if (!n.IsSequence()) throw std::invalid_argument("expected a list");
         config.algorithms.clear();
         for (const auto& item : n) {
           auto name = scalar<std::string>(item);
           check_algorithm_name(name);
           config.algorithms.push_back(name);
         }
       }},
      {"betas", [&](const YAML::Node& n) {
         if (!n.IsSequence()) throw std::invalid_argument("expected a list");
         config.betas.clear();
         for (const auto& item : n) {
           try {
             config.betas.push_back(beta_value(item));
           } catch (const std::invalid_argument& e) {
             throw ConfigError(where(source, item.Mark()) + ": betas: " + e.what());
           }
         }
       }},
      {"discount", [&](const YAML::Node& n) {
         hp.discount = finite_number(n);
         if (!(hp.discount > 0.0 && hp.discount <= 1.0)) {
           throw std::invalid_argument("discount must lie in (0, 1]");
         }
       }},
      {"eps_tutor", [&](const YAML::Node& n) { hp.eps_tutor = open_probability(n); }},
      {"eps_rl", [&](const YAML::Node& n) { hp.eps_rl = open_probability(n); }},
      {"lr_decay_scale", [&](const YAML::Node& n) { hp.lr_schedule.decay_scale = positive(n); }},
      {"gain", [&](const YAML::Node& n) {
         const auto k = number_list(n, 2);
         config.base.gain = {k[0], k[1]};
       }},
      {"prize_value", [&](const YAML::Node& n) { rp.prize_value = positive(n); }},
      {"prize_radius", [&](const YAML::Node& n) { rp.prize_radius = positive(n); }},
      {"mass", [&](const YAML::Node& n) { env.mass = positive(n); }},
      {"length", [&](const YAML::Node& n) { env.length = positive(n); }},
      {"gravity", [&](const YAML::Node& n) { env.gravity = positive(n); }},
      {"sample_time", [&](const YAML::Node& n) { env.sample_time = positive(n); }},
      {"integrator", [&](const YAML::Node& n) { env.integrator = parse_integrator(scalar<std::string>(n)); }},
      {"initial_state", [&](const YAML::Node& n) {
         const auto x = number_list(n, 2);
         if (x[0] < -kPi || x[0] > kPi || x[1] < -kMaxAngularVelocity ||
             x[1] > kMaxAngularVelocity) {
           throw std::invalid_argument("initial state outside [-pi, pi] x [-8, 8]");
         }
         config.initial_state = {wrap_angle(x[0]), x[1]};
       }},
      {"velocity_noise_std", [&](const YAML::Node& n) {
         config.velocity_noise_std = finite_number(n);
         if (config.velocity_noise_std < 0.0) throw std::invalid_argument("must be >= 0");
       }},
      {"parallelism", [&](const YAML::Node& n) {
         config.parallelism = scalar<int>(n);
         if (config.parallelism < 0) throw std::invalid_argument("must be >= 0");
       }},
      {"unsafe", [&](const YAML::Node& n) { config.unsafe = scalar<bool>(n); }},
      {"robustness", [&](const YAML::Node& n) { apply_mapping(n, robustness_keys, source); }},
  };

  apply_mapping(root, keys, source);

  try {
    config.env = PendulumParams(env.mass, env.length, env.gravity, env.sample_time,
                                env.integrator);
    if (eta && eta_fraction) throw std::invalid_argument("set either eta or eta_fraction");
    if (eta) config.goal.eta = *eta;
    if (eta_fraction) config.goal.eta = *eta_fraction * GoalSpec::max_state_norm();
    config.plan();
    config.robustness.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::vector<AlgorithmConfig> ExperimentConfig::resolved_algorithms() const {
  AlgorithmConfig b = base;
  b.reward = reward;
  b.allow_unsafe = unsafe;
  if (algorithms.empty()) return default_algorithms(reward, b, betas, false);

  std::vector<AlgorithmConfig> out;
  for (const auto& name : algorithms) {
    AlgorithmConfig c = b;
    if (name == "ql" || name == "ctql") {
      c.kind = parse_algorithm_kind(name);
      out.push_back(c);
    } else if (name == "pctql") {
      c.kind = AlgorithmKind::kPCTQL;
      for (double beta : betas) {
        c.beta = beta;
        out.push_back(c);
      }
    } else {
      check_algorithm_name(name);
      c.kind = AlgorithmKind::kPCTQL;
      c.beta = std::stod(name.substr(6));
      out.push_back(c);
    }
  }
  // Drop duplicates while keeping the first occurrence.
  std::vector<AlgorithmConfig> unique;
  for (const auto& c : out) {
    bool seen = false;
    for (const auto& u : unique) seen = seen || u.label() == c.label();
    if (!seen) unique.push_back(c);
  }
  return unique;
}

BenchmarkPlan ExperimentConfig::plan() const {
  BenchmarkPlan p;
  p.sessions = sessions;
  p.episodes = episodes;
  p.goal = goal;
  p.env = env;
  p.initial_state = initial_state;
  p.reward = reward;
  p.algorithms = resolved_algorithms();
  p.master_seed = seed;
  p.velocity_noise_std = velocity_noise_std;
  p.parallelism = parallelism;
  p.validate();
  return p;
}

nlohmann::json ExperimentConfig::to_json() const {
  const Hyperparams& hp = base.hyperparams;
  const RewardParams& rp = base.reward_params;
  return {
      {"sessions", sessions},
      {"episodes", episodes},
      {"horizon", goal.horizon},
      {"n_minus", goal.n_minus},
      {"eta", goal.eta},
      {"seed", seed},
      {"reward", to_string(reward)},
      {"algorithms", algorithms},
      {"betas", betas},
      {"discount", hp.discount},
      {"eps_tutor", hp.eps_tutor},
      {"eps_rl", hp.eps_rl},
      {"lr_decay_scale", hp.lr_schedule.decay_scale},
      {"gain", {base.gain.k1, base.gain.k2}},
      {"prize_value", rp.prize_value},
      {"prize_radius", rp.prize_radius},
      {"mass", env.mass()},
      {"length", env.length()},
      {"gravity", env.gravity()},
      {"sample_time", env.sample_time()},
      {"integrator", integrator_name(env.integrator())},
      {"initial_state", {initial_state.angle, initial_state.angular_velocity}},
      {"velocity_noise_std", velocity_noise_std},
      {"parallelism", parallelism},
      {"unsafe", unsafe},
      {"robustness",
       {{"setups", robustness.num_setups},
        {"mass_factor", {robustness.mass_factor.lo, robustness.mass_factor.hi}},
        {"length_factor", {robustness.length_factor.lo, robustness.length_factor.hi}},
        {"angle", {robustness.angle.lo, robustness.angle.hi}},
        {"velocity", {robustness.angular_velocity.lo, robustness.angular_velocity.hi}},
        {"seed", robustness.seed}}},
  };
}

AlgorithmConfig algorithm_from_label(const std::string& label,
                                     const ExperimentConfig& config) {
  AlgorithmConfig c = config.base;
  c.reward = config.reward;
  c.allow_unsafe = config.unsafe;
  if (label == "ql" || label == "ctql") {
    c.kind = parse_algorithm_kind(label);
  } else if (label.rfind("pctql-", 0) == 0) {
    c.kind = AlgorithmKind::kPCTQL;
    c.beta = std::stod(label.substr(6));
  } else {
    throw std::invalid_argument("unknown algorithm label '" + label + "'");
  }
  c.validate();
  return c;
}

}  // namespace ctql
