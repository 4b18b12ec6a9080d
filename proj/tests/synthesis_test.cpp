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

#include "quantsyn/synthesis.hpp"

#include "quantsyn/models.hpp"

#include <gtest/gtest.h>

namespace quantsyn {
namespace {

const StateSet kAll{0, 1, 2, 3, 4};

struct Example {
  LtsFixture fixture = example_lts();
  AbstractLts abs = from_explicit(fixture.lts, {3}, fixture.goal);
};

// Alg. 2's per-action inner fixpoint, explicitly: (s, a) is added once every
// successor of s under a is in the target or already paired with a.
ControllerRel explicit_inner(const ExplicitLts& lts, const StateSet& target) {
  ControllerRel e;
  for (bool grown = true; grown;) {
    grown = false;
    for (unsigned s = 0; s < lts.state_count(); ++s) {
      for (unsigned a : lts.adm(s)) {
        if (e.count({s, a})) continue;
        bool all = true;
        for (unsigned t : lts.img(s, a)) all = all && (target.count(t) || e.count({t, a}));
        if (all) {
          e.emplace(s, a);
          grown = true;
        }
      }
    }
  }
  return e;
}

TEST(StrongPreimageTest, ExampleCases) {
  Example ex;
  BddManager& mgr = *ex.abs.mgr;
  const auto next = ex.abs.layout.next_vars();
  const Bdd adm = ex.abs.trans.exists(next);
  EXPECT_TRUE(strong_preimage(ex.abs.trans, mgr.bdd_true(), next) == adm);
  EXPECT_TRUE(strong_preimage(ex.abs.trans, mgr.bdd_false(), next).is_false());
  const Bdd zero = encode_states(ex.abs, {0}).rename(ex.abs.layout.present_to_next());
  const Bdd pre = strong_preimage(ex.abs.trans, zero, next);
  EXPECT_EQ(decode_controller(ex.abs, pre), (ControllerRel{{0, 0}, {0, 1}, {1, 0}, {4, 1}}));
}

TEST(MgoTest, ExampleController) {
  Example ex;
  const auto r = mgo_ctr(ex.abs);
  const ControllerRel expected{{0, 0}, {0, 1}, {1, 0}, {2, 0}, {3, 1}, {4, 1}};
  EXPECT_TRUE(r.initial_controllable);
  EXPECT_EQ(decode_controller(ex.abs, r.controller), expected);
  EXPECT_EQ(decode_states(ex.abs, r.domain), kAll);
  std::vector<unsigned> support = ex.abs.layout.present_vars();
  for (unsigned a : ex.abs.layout.action) support.push_back(a);
  std::sort(support.begin(), support.end());
  EXPECT_EQ(r.controller.sat_count(support), 6u);
  EXPECT_FALSE(is_control_law(ex.abs, r.controller));
  EXPECT_EQ(avg_worst_case_path(ex.abs, r.controller), Rational(7, 5));
}

TEST(SmallTest, ExamplePriorities) {
  Example ex;
  const auto zero_first = small_ctr(ex.abs, {0, 1});
  EXPECT_TRUE(zero_first.initial_controllable);
  EXPECT_EQ(decode_controller(ex.abs, zero_first.controller),
            (ControllerRel{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}}));
  EXPECT_TRUE(is_control_law(ex.abs, zero_first.controller));
  EXPECT_EQ(avg_worst_case_path(ex.abs, zero_first.controller), Rational(8, 5));

  const auto one_first = small_ctr(ex.abs, {1, 0});
  EXPECT_EQ(decode_controller(ex.abs, one_first.controller),
            (ControllerRel{{0, 1}, {4, 1}, {1, 0}, {2, 0}, {3, 0}}));
  EXPECT_TRUE(is_control_law(ex.abs, one_first.controller));

  const auto dflt = small_ctr(ex.abs);
  EXPECT_TRUE(dflt.controller == zero_first.controller);
  EXPECT_THROW(small_ctr(ex.abs, {0}), UsageError);
  EXPECT_THROW(small_ctr(ex.abs, {0, 0}), UsageError);
}

TEST(SmallTest, FirstInnerFixpoint) {
  Example ex;
  const ControllerRel e = explicit_inner(ex.fixture.lts, ex.fixture.goal);
  EXPECT_EQ(e, (ControllerRel{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}, {4, 1}}));
  // The whole state space is controlled after the first outer iteration.
  const auto r = small_ctr(ex.abs);
  ASSERT_FALSE(r.telemetry.empty());
  EXPECT_EQ(r.telemetry.front().domain_states, 5u);
}

TEST(SynthesisTest, EmptyGoal) {
  const auto f = example_lts();
  const AbstractLts abs = from_explicit(f.lts, {3}, {});
  for (const auto& r : {mgo_ctr(abs), small_ctr(abs)}) {
    EXPECT_FALSE(r.initial_controllable);
    EXPECT_TRUE(r.controller.is_false());
    EXPECT_TRUE(r.domain.is_false());
  }
}

TEST(SynthesisTest, ExplicitRoundTrip) {
  Example ex;
  const auto back = to_explicit(ex.abs);
  EXPECT_EQ(back.goal, ex.fixture.goal);
  EXPECT_EQ(back.init, StateSet{3});
  for (const auto& t : ex.fixture.lts.transitions()) EXPECT_TRUE(back.lts.has(t.source, t.action, t.target));
  EXPECT_EQ(back.lts.transition_count(), ex.fixture.lts.transition_count());
  const ControllerRel k{{1, 0}, {4, 1}};
  EXPECT_EQ(decode_controller(ex.abs, encode_controller(ex.abs, k)), k);
}

class RandomSynthesisTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomSynthesisTest, AgreesWithOracle) {
  const std::uint64_t seed = GetParam();
  const std::size_t states = 4 + seed % 29;
  const std::size_t actions = 1 + seed % 4;
  const auto f = random_lts(states, actions, 2.0 / static_cast<double>(states), seed);
  StateSet init;
  for (unsigned s = 0; s < states; s += 3) init.insert(s);
  const AbstractLts abs = from_explicit(f.lts, init, f.goal);

  const auto oracle = mgo_oracle(f.lts, init, f.goal);
  const auto mgo = mgo_ctr(abs);
  EXPECT_TRUE(mgo.controller == encode_controller(abs, oracle.controller));
  EXPECT_EQ(mgo.initial_controllable, oracle.initial_controllable);
  EXPECT_LE(mgo.iterations, states + 1);

  const auto small = small_ctr(abs);
  EXPECT_TRUE(small.domain == mgo.domain);
  EXPECT_TRUE(is_control_law(abs, small.controller));
  const ControllerRel law = decode_controller(abs, small.controller);
  EXPECT_TRUE(is_control_law(law));
  const StateSet dom = domain(law);
  EXPECT_TRUE(is_solution(f.lts, law, dom, f.goal));
  for (std::size_t i = 1; i < small.telemetry.size(); ++i) {
    EXPECT_GE(small.telemetry[i].domain_states, small.telemetry[i - 1].domain_states);
  }
  if (!dom.empty()) {
    EXPECT_LE(avg_worst_case_path(abs, mgo.controller), avg_worst_case_path(abs, small.controller));
    EXPECT_EQ(avg_worst_case_path(abs, mgo.controller), avg_worst_case_path(f.lts, oracle.controller, f.goal));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomSynthesisTest, ::testing::Range<std::uint64_t>(1, 41));

TEST(SynthesisTest, ScalarAbstractionMatchesOracle) {
  const auto m = scalar_model(Rational(1, 100), Rational(1, 4), 3);
  const AbstractLts abs = build_abstraction(m.plant, m.quantization, m.init, m.goal);
  const auto ex = to_explicit(abs);
  const auto oracle = mgo_oracle(ex.lts, ex.init, ex.goal);
  const auto mgo = mgo_ctr(abs);
  EXPECT_TRUE(mgo.initial_controllable);
  EXPECT_EQ(decode_controller(abs, mgo.controller), oracle.controller);
  const auto small = small_ctr(abs);
  EXPECT_TRUE(small.domain == mgo.domain);
  EXPECT_TRUE(is_solution(ex.lts, decode_controller(abs, small.controller), ex.init, ex.goal));
}

}  // namespace
}  // namespace quantsyn
