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

#include <array>
#include <numbers>

namespace ctql {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kMaxAngularVelocity = 8.0;
inline constexpr double kMaxTorque = 2.0;

enum class Integrator { kForwardEuler, kSemiImplicit };

// Rigid rod pivoting at one end. Inertia is always derived from mass and
// length, never stored.
class PendulumParams {
 public:
  PendulumParams() = default;
  PendulumParams(double mass, double length, double gravity, double sample_time,
                 Integrator integrator = Integrator::kForwardEuler);

  double mass() const { return mass_; }
  double length() const { return length_; }
  double gravity() const { return gravity_; }
  double sample_time() const { return sample_time_; }
  Integrator integrator() const { return integrator_; }
  double inertia() const { return mass_ * length_ * length_ / 3.0; }

  bool operator==(const PendulumParams&) const = default;

 private:
  double mass_ = 1.0;
  double length_ = 1.0;
  double gravity_ = 10.0;
  double sample_time_ = 0.05;
  Integrator integrator_ = Integrator::kForwardEuler;
};

// angle = 0 is the upright (unstable) position.
struct State {
  double angle = 0.0;
  double angular_velocity = 0.0;

  bool operator==(const State&) const = default;
};

struct TorqueInput {
  double torque = 0.0;
};

// x_{k+1} = A x_k + B v_k, row-major.
struct LinearModel {
  std::array<std::array<double, 2>, 2> a_matrix{};
  std::array<double, 2> b_matrix{};
};

/// Maps an angle into (-pi, pi]; -pi itself maps to +pi.
double wrap_angle(double angle);

/// One sampling period of the pendulum. Torque is saturated to
/// [-kMaxTorque, kMaxTorque]; the result has its angle wrapped and its
/// velocity clamped to [-kMaxAngularVelocity, kMaxAngularVelocity].
/// `disturbance` is added to the integrated state before wrapping and is
/// zero in the benchmark.
/// Throws std::invalid_argument on non-finite state, torque or disturbance.
State step(const State& state, TorqueInput input, const PendulumParams& params,
           const State& disturbance = {});

/// Linearization about the upright equilibrium used to synthesize the tutor.
/// The first row is kept as [0, 1 + T].
LinearModel linearized_model(const PendulumParams& params);

/// Scales mass and length by factors in [0.95, 1.05].
PendulumParams perturb_params(const PendulumParams& nominal, double mass_factor,
                              double length_factor);

}  // namespace ctql
