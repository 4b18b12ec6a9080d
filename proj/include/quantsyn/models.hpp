// Copyright 2026 The quantsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// @file
///
/// Built-in benchmark plants: the inverted pendulum, the multi-input buck
/// DC-DC converter and a one-variable scalar system.

#include "quantsyn/dtlhs.hpp"

#include <string>
#include <vector>

namespace quantsyn {

/// A control problem over a quantized plant.
struct ModelInstance {
  std::string name;
  Dtlhs plant;
  Quantization quantization;
  Region init;
  Region goal;
  Rational sampling;  // T in seconds
};

/// Rational stand-in for pi used by the pendulum model.
Rational pendulum_pi();

/// Linear bounds lower(y) <= sin(y) <= upper(y) on one quarter of [-pi, pi].
struct SinBounds {
  Interval domain;
  Rational lower_slope, lower_offset;
  Rational upper_slope, upper_offset;
};

/// The four quarter intervals, from [-pi, -pi/2] to [pi/2, pi]. On each one
/// the chord and the tangent at the midpoint bound sin, moved outward by
/// `margin` after rounding to six decimals.
std::vector<SinBounds> sin_bounds(const Rational& margin = Rational(1, 100000));

/// Pendulum with torque intensity `force`, sampling time `sampling`, `bits`
/// per state variable and goal [-rho, rho]^2.
ModelInstance pendulum_model(const Rational& force, const Rational& sampling, unsigned bits,
                             const Rational& rho);

struct BuckParameters {
  Rational inductance{2, 10000};
  Rational r_l{1, 10};
  Rational r_c{1, 10};
  Rational load{5};
  Rational capacitance{5, 100000};
  Rational r_on{0};
  Rational r_off{10000};
  Rational voltage_step{10};  // V_i = i * voltage_step
};

/// Coefficients a[i][j] of the continuous-time buck dynamics.
std::vector<std::vector<Rational>> buck_coefficients(const BuckParameters& p);

ModelInstance buck_model(unsigned inputs, const Rational& sampling, unsigned bits, const Rational& rho,
                         const BuckParameters& p = {});

/// x' = x + (5/4 - x) T under u = 0 and x' = x + (x - 3/2) T under u = 1 on
/// [-2, 2.5], goal [-eps, eps]. With `bits` = 0 the quantizer is floor(x),
/// otherwise floor(2^bits x).
ModelInstance scalar_model(const Rational& sampling, const Rational& eps, unsigned bits = 0);

}  // namespace quantsyn
