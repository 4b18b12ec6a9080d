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

#include "quantsyn/models.hpp"

#include "quantsyn/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace quantsyn {
namespace {

Rational r(long long p, long long q = 1) { return Rational(p, q); }

double lower(const SinBounds& s, double y) { return to_double(s.lower_slope) * y + to_double(s.lower_offset); }
double upper(const SinBounds& s, double y) { return to_double(s.upper_slope) * y + to_double(s.upper_offset); }

TEST(PendulumModelTest, RationalPi) {
  EXPECT_EQ(pendulum_pi(), r(355, 113));
  EXPECT_NEAR(to_double(pendulum_pi()), M_PI, 1e-6);
}

TEST(PendulumModelTest, FirstQuarterCoefficients) {
  const auto b = sin_bounds();
  ASSERT_EQ(b.size(), 4u);
  // Convex quarter: the chord is the upper bound, the tangent the lower one.
  EXPECT_NEAR(to_double(b[0].upper_slope), -0.637, 5e-4);
  EXPECT_NEAR(to_double(b[0].upper_offset), -2.0, 5e-4);
  EXPECT_NEAR(to_double(b[0].lower_slope), -0.707, 5e-4);
  EXPECT_NEAR(to_double(b[0].lower_offset), -2.373, 5e-4);
}

TEST(PendulumModelTest, ChordMeetsSinAtQuarterEnd) {
  const auto b = sin_bounds();
  const double y = -to_double(pendulum_pi()) / 2;
  EXPECT_NEAR(upper(b[0], y), -1.0, 1e-4);
  EXPECT_NEAR(upper(b[1], y), -1.0, 1e-4);  // sin is convex on the second quarter too
  EXPECT_GE(upper(b[0], y), std::sin(y));
}

TEST(PendulumModelTest, ThirdQuarterRoles) {
  const auto b = sin_bounds();
  const double pi = M_PI;
  // Concave quarter: chord (2/pi) y below, tangent at pi/4 above.
  EXPECT_NEAR(to_double(b[2].lower_slope), 2 / pi, 1e-5);
  EXPECT_NEAR(to_double(b[2].lower_offset), 0.0, 1e-4);
  EXPECT_NEAR(to_double(b[2].upper_slope), std::cos(pi / 4), 1e-5);
  EXPECT_NEAR(to_double(b[2].upper_offset), std::sin(pi / 4) - std::cos(pi / 4) * pi / 4, 1e-4);
}

TEST(PendulumModelTest, SinBoundsAreSound) {
  std::mt19937 rng(1);
  for (const SinBounds& s : sin_bounds()) {
    const double lo = to_double(s.domain.lo), hi = to_double(s.domain.hi);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int i = 0; i < 10000; ++i) {
      const double y = i == 0 ? lo : i == 1 ? hi : dist(rng);
      EXPECT_LE(lower(s, y), std::sin(y)) << y;
      EXPECT_GE(upper(s, y), std::sin(y)) << y;
    }
  }
}

TEST(PendulumModelTest, Structure) {
  const auto m = pendulum_model(r(2), r(1, 10), 8, r(1, 10));
  const auto& vars = m.plant.vars();
  EXPECT_EQ(m.plant.x().size(), 2u);
  EXPECT_EQ(vars[m.plant.x()[0]].name, "x1");
  EXPECT_EQ(vars[m.plant.x_next()[1]].name, "x2'");
  ASSERT_EQ(m.plant.u().size(), 1u);
  EXPECT_EQ(vars[m.plant.u()[0]].sort, Sort::integer);
  EXPECT_EQ(m.quantization.action_bits(), 2u);
  EXPECT_EQ(m.quantization.cell_count(), 65536u);
  const Rational wide = pendulum_pi() * r(11, 10);
  EXPECT_EQ(m.quantization.state()[0].admissible, (Interval{-wide, wide}));
  EXPECT_EQ(m.sampling, r(1, 10));
  EXPECT_THROW(pendulum_model(r(0), r(1, 10), 8, r(1, 10)), UsageError);
}

// A forward Euler step of the nonlinear pendulum, in exact arithmetic except
// for sin, is a transition of the model.
TEST(PendulumModelTest, EulerStepSatisfiesModel) {
  const Rational force(1, 2), t(1, 10);
  const auto m = pendulum_model(force, t, 8, r(1, 10));
  const Rational pi = pendulum_pi();
  auto wrap = [&](Rational a) {
    if (a > pi) a -= 2 * pi;
    if (a < -pi) a += 2 * pi;
    return a;
  };
  std::mt19937 rng(2);
  const long long den = 1 << 16;
  for (int i = 0; i < 300; ++i) {
    const Rational x1 = -pi * r(11, 10) + pi * r(22, 10) * Rational(static_cast<long long>(rng() % (den + 1)), den);
    const Rational x2 = r(-4) + r(8) * Rational(static_cast<long long>(rng() % (den + 1)), den);
    const Rational u(static_cast<long long>(rng() % 3) - 1);
    const Rational s = round_to(std::sin(to_double(x1)), 1000000000);
    const Rational n1 = wrap(x1 + t * x2);
    const Rational n2 = x2 + t * s + t * force * u;
    const bool ok = transition_check(m.plant, {{m.plant.x()[0], x1}, {m.plant.x()[1], x2}},
                                     {{m.plant.u()[0], u}}, {{m.plant.x_next()[0], n1}, {m.plant.x_next()[1], n2}});
    EXPECT_TRUE(ok) << to_string(x1) << " " << to_string(x2) << " " << to_string(u);
  }
}

TEST(BuckModelTest, Coefficients) {
  const auto a = buck_coefficients(BuckParameters{});
  EXPECT_EQ(a[0][0], r(-500));
  EXPECT_EQ(a[0][1], r(-5000));
  EXPECT_NEAR(to_double(a[1][2]), -490.196, 1e-3);
  EXPECT_EQ(a[1][2], r(-5000) * r(1, 2) / r(51, 10));
}

TEST(BuckModelTest, SingleInputVariables) {
  const auto m = buck_model(1, r(1, 1000000), 8, r(1, 100));
  const auto& vars = m.plant.vars();
  ASSERT_EQ(m.plant.u().size(), 1u);
  EXPECT_EQ(vars[m.plant.u()[0]].name, "u1");
  std::vector<std::string> booleans;
  for (VarId y : m.plant.y()) {
    if (vars[y].sort == Sort::boolean) booleans.push_back(vars[y].name);
  }
  EXPECT_EQ(booleans, std::vector<std::string>{"q0"});
  EXPECT_EQ(m.quantization.action_bits(), 1u);
  EXPECT_EQ(buck_model(3, r(1, 1000000), 4, r(1, 100)).quantization.action_bits(), 3u);
  EXPECT_THROW(buck_model(0, r(1, 1000000), 8, r(1, 100)), UsageError);
}

// Closed-form modes of the one-input converter with r_on = 0, r_off = 1e4.
double buck_vd(double il, bool u) {
  if (u) return -10.0;
  if (il >= 1e-3) return 0.0;
  return 5000.0 * il - 5.0;
}

TEST(BuckModelTest, DeterminizedStepMatchesCircuit) {
  const Rational t(1, 1000000);
  const auto m = buck_model(1, t, 8, r(1, 100));
  const auto plant = determinized_plant(m.plant, m.quantization);
  const auto a = buck_coefficients(BuckParameters{});
  const double T = 1e-6;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> il_dist(-4, 4), vo_dist(-1, 7);
  for (int i = 0; i < 500; ++i) {
    const double il = i == 0 ? 0.0 : il_dist(rng), vo = i == 0 ? 0.0 : vo_dist(rng);
    const std::uint64_t act = rng() % 2;
    const bool u = to_double((*m.quantization.action_values(act))[0]) == 1.0;
    const auto next = plant->step({il, vo}, act);
    ASSERT_TRUE(next);
    const double vd = buck_vd(il, u);
    const double il_n = (1 + T * to_double(a[0][0])) * il + T * to_double(a[0][1]) * vo + T * to_double(a[0][2]) * vd;
    const double vo_n = T * to_double(a[1][0]) * il + (1 + T * to_double(a[1][1])) * vo + T * to_double(a[1][2]) * vd;
    EXPECT_NEAR((*next)[0], il_n, 1e-9 * std::max(1.0, std::abs(il_n))) << il << " " << vo << " " << u;
    EXPECT_NEAR((*next)[1], vo_n, 1e-9 * std::max(1.0, std::abs(vo_n))) << il << " " << vo << " " << u;
  }
}

TEST(ScalarModelTest, Fixpoints) {
  const auto m = scalar_model(r(1, 100), r(1, 4), 3);
  const VarId x = m.plant.x()[0], u = m.plant.u()[0], xn = m.plant.x_next()[0];
  EXPECT_TRUE(transition_check(m.plant, {{x, r(5, 4)}}, {{u, r(0)}}, {{xn, r(5, 4)}}));
  EXPECT_TRUE(transition_check(m.plant, {{x, r(3, 2)}}, {{u, r(1)}}, {{xn, r(3, 2)}}));
  EXPECT_FALSE(transition_check(m.plant, {{x, r(3, 2)}}, {{u, r(0)}}, {{xn, r(3, 2)}}));
}

TEST(ScalarModelTest, CoarseCellsAreIntegers) {
  const auto m = scalar_model(r(1, 100), r(1, 4));
  const Quantizer& q = m.quantization.state()[0];
  EXPECT_EQ(q.count, 5u);
  EXPECT_EQ(q.index(0), -2);
  EXPECT_EQ(q.index(q.count - 1), 2);
  EXPECT_THROW(scalar_model(r(1, 10), r(1, 4)), UsageError);
}

}  // namespace
}  // namespace quantsyn
