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

#include "ctql/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ctql {

namespace {

constexpr double kMinPerturbation = 0.95;
constexpr double kMaxPerturbation = 1.05;

bool finite(const State& s) {
  return std::isfinite(s.angle) && std::isfinite(s.angular_velocity);
}

}  // namespace

PendulumParams::PendulumParams(double mass, double length, double gravity,
                               double sample_time, Integrator integrator)
    : mass_(mass),
      length_(length),
      gravity_(gravity),
      sample_time_(sample_time),
      integrator_(integrator) {
  // Negated comparisons so NaN is rejected too.
  if (!(mass > 0.0) || !(length > 0.0) || !(gravity > 0.0) ||
      !(sample_time > 0.0) || !std::isfinite(mass) || !std::isfinite(length) ||
      !std::isfinite(gravity) || !std::isfinite(sample_time)) {
    throw std::invalid_argument(
        "PendulumParams: mass, length, gravity and sample_time must be finite "
        "and positive");
  }
}

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

State step(const State& state, TorqueInput input, const PendulumParams& params,
           const State& disturbance) {
  if (!finite(state) || !std::isfinite(input.torque) || !finite(disturbance)) {
    throw std::invalid_argument("step: non-finite state, torque or disturbance");
  }
  const double torque = std::clamp(input.torque, -kMaxTorque, kMaxTorque);
  const double dt = params.sample_time();
  const double acceleration =
      1.5 * params.gravity() / params.length() * std::sin(state.angle) +
      torque / params.inertia();

  double velocity = state.angular_velocity + dt * acceleration;
  double angle = 0.0;
  if (params.integrator() == Integrator::kForwardEuler) {
    angle = state.angle + dt * state.angular_velocity;
  } else {
    velocity = std::clamp(velocity, -kMaxAngularVelocity, kMaxAngularVelocity);
    angle = state.angle + dt * velocity;
  }
  angle += disturbance.angle;
  velocity += disturbance.angular_velocity;

  return {wrap_angle(angle),
          std::clamp(velocity, -kMaxAngularVelocity, kMaxAngularVelocity)};
}

LinearModel linearized_model(const PendulumParams& params) {
  const double dt = params.sample_time();
  LinearModel model;
  model.a_matrix = {{{0.0, 1.0 + dt},
                     {3.0 * dt * params.gravity() / (2.0 * params.length()), 1.0}}};
  model.b_matrix = {0.0, dt / params.inertia()};
  return model;
}

PendulumParams perturb_params(const PendulumParams& nominal, double mass_factor,
                              double length_factor) {
  auto in_range = [](double f) {
    return f >= kMinPerturbation && f <= kMaxPerturbation;
  };
  if (!in_range(mass_factor) || !in_range(length_factor)) {
    throw std::invalid_argument("perturb_params: factors must lie in [0.95, 1.05], got " +
                                std::to_string(mass_factor) + ", " +
                                std::to_string(length_factor));
  }
  return PendulumParams(nominal.mass() * mass_factor,
                        nominal.length() * length_factor, nominal.gravity(),
                        nominal.sample_time(), nominal.integrator());
}

}  // namespace ctql
